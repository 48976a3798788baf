// Copyright 2026 The ganlocal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include "doctest.h"
#include "ganlocal/editor.hpp"
#include "ganlocal/error.hpp"
#include "oracles.hpp"

using namespace ganlocal;
using namespace ganlocal::editor;

namespace {

// A 3-cluster catalog whose attribution columns are random partitions of
// one, shaped for the given generator.
SemanticCatalog synthetic_catalog(const minigen::GeneratorConfig& cfg, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  semantics::CentroidMatrix cent{3, 2, {1, 0, 0, 1, 0.6f, 0.8f}};
  auto c = make_catalog(cfg.base_layer, cent, one_hot({0, 1, 2, 0}, 1, 3, 2, 2), ChannelMoments{{0, 0}, {1, 1}},
                        Provenance{});
  std::map<int, semantics::AttributionMatrix> attr;
  for (std::size_t l = 0; l < cfg.layers(); ++l) {
    semantics::AttributionMatrix m{3, cfg.widths[l], static_cast<int>(l), std::vector<float>(3 * cfg.widths[l])};
    for (std::size_t ch = 0; ch < cfg.widths[l]; ++ch) {
      double w[3] = {u(gen), u(gen), u(gen)};
      const double s = w[0] + w[1] + w[2];
      for (std::size_t k = 0; k < 3; ++k) m.m[k * m.c + ch] = static_cast<float>(w[k] / s);
    }
    attr[static_cast<int>(l)] = m;
  }
  return with_attributions(c, attr);
}

std::vector<double> random_row(std::mt19937& gen, std::size_t c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(c);
  for (auto& v : m) v = u(gen);
  return m;
}

}  // namespace

TEST_CASE("sequential query: free channel, fractional fill, exhausted budget") {
  const std::vector<double> m{1.0, 0.9, 0.2};
  const auto q = query_sequential(m, 0.05, 0.1).q;
  CHECK(q[0] == 1.0);
  CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q[2] == 0.0);
}

TEST_CASE("sequential query ignores channels at or below the threshold") {
  const std::vector<double> m{0.1, 0.05, 0.1000001, 0.0};
  const auto q = query_sequential(m, 100.0, 0.1).q;
  CHECK(q == std::vector<double>{0.0, 0.0, 1.0, 0.0});
}

TEST_CASE("sequential query breaks ties by channel index") {
  const std::vector<double> m{0.5, 0.7, 0.5, 0.5};
  const auto q = query_sequential(m, 0.3 + 0.5 + 0.25, 0.1).q;
  CHECK(q[1] == 1.0);
  CHECK(q[0] == 1.0);
  CHECK(q[2] == doctest::Approx(0.5));
  CHECK(q[3] == 0.0);
}

TEST_CASE("sequential query equals the linear-program optimum") {
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> eps(0.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    const auto m = random_row(gen, 16);
    const double e = eps(gen);
    const auto q = query_sequential(m, e, 0.1).q;
    const auto lp = oracle::knapsack_lp(m, e, 0.1);
    for (std::size_t c = 0; c < 16; ++c) CHECK(q[c] == doctest::Approx(lp[c]).epsilon(1e-9));
  }
}

TEST_CASE("sequential query respects the budget and nests in epsilon") {
  std::mt19937 gen(22);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_row(gen, 24);
    std::vector<double> prev(24, 0.0);
    for (double e : {0.0, 0.1, 0.5, 1.0, 2.5, 5.0, 30.0}) {
      const auto q = query_sequential(m, e, 0.1).q;
      CHECK(budget_used(q, m) <= e + 1e-9);
      for (std::size_t c = 0; c < 24; ++c) {
        CHECK(q[c] >= 0.0);
        CHECK(q[c] <= 1.0);
        if (prev[c] > 0.0) CHECK(q[c] > 0.0);
        CHECK(q[c] >= prev[c]);
      }
      prev = q;
    }
  }
}

TEST_CASE("simultaneous query is lambda times attribution clipped at one") {
  const std::vector<double> m{0.1, 0.5, 0.0, 0.9};
  CHECK(query_simultaneous(m, 2.0).q == std::vector<double>{0.2, 1.0, 0.0, 1.0});
  CHECK(query_simultaneous(m, 0.0).q == std::vector<double>(4, 0.0));
}

TEST_CASE("interpolation is exact at both ends") {
  const std::vector<float> s{0.3f, -1.7f, 2.5f};
  const std::vector<float> r{1.1f, 0.4f, -0.9f};
  CHECK(interpolate_conditioned(s, r, std::vector<double>(3, 0.0)) == s);
  CHECK(interpolate_conditioned(s, r, std::vector<double>(3, 1.0)) == r);
  const auto mid = interpolate_conditioned(s, r, std::vector<double>{0.5, 0.0, 1.0});
  CHECK(mid[0] == doctest::Approx(0.7f));
  CHECK(mid[1] == s[1]);
  CHECK(mid[2] == r[2]);
  CHECK(interpolate_global(s, r, 0.25)[0] == doctest::Approx(0.3 + 0.25 * 0.8));
  CHECK_THROWS_AS(interpolate_conditioned(s, r, std::vector<double>(2, 0.0)), Error);
}

TEST_CASE("parameter validation and mode names") {
  CHECK(parse_mode("sequential") == EditMode::kSequential);
  CHECK(to_string(EditMode::kSimultaneous) == "simultaneous");
  CHECK_THROWS_AS(parse_mode("diagonal"), Error);
  EditParams p;
  p.epsilon = -1;
  CHECK_THROWS_AS(validate(p), Error);
  p = EditParams{};
  p.rho_ratio = 1.0;
  CHECK_THROWS_AS(validate(p), Error);
  p = EditParams{EditMode::kGlobal, 1.5, 0, 0};
  CHECK_THROWS_AS(validate(p), Error);
  p = EditParams{EditMode::kSimultaneous, 3.0, 0, 0};
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("queries are built per layer from the part's attribution row") {
  const minigen::GeneratorConfig cfg;
  const auto cat = merge_clusters(synthetic_catalog(cfg, 1), {0, 2}, "pair");
  const auto part = select_part(cat, "pair");
  EditParams p{EditMode::kSimultaneous, 1.0, 0, 0};
  const auto q = build_queries(cat, part, p, cfg.layers(), std::nullopt);
  REQUIRE(q.size() == cfg.layers());
  for (const auto& [layer, qv] : q) {
    const auto row = part_row(cat, layer, part);
    for (std::size_t c = 0; c < row.size(); ++c) CHECK(qv.q[c] == doctest::Approx(row[c]));
  }
  const auto only = build_queries(cat, part, p, cfg.layers(), std::set<int>{2, 4});
  CHECK(only.size() == 2);
  CHECK(only.count(4) == 1);
  auto sparse = cat;
  sparse.attributions.erase(3);
  CHECK_THROWS_AS(build_queries(sparse, part, p, cfg.layers(), std::nullopt), Error);
}

TEST_CASE("zero budget reproduces the target and full transfer the reference") {
  const minigen::Generator g(minigen::GeneratorConfig{});
  const auto cat = synthetic_catalog(g.config(), 2);
  EditRequest req;
  req.target = std::uint64_t{10};
  req.reference = std::uint64_t{11};
  req.part = select_part(cat, "cluster:1");
  req.params = EditParams{EditMode::kSequential, 1.0, 0.0, 0.1};
  const auto id = edit(req, cat, g);
  CHECK(id.edited.image == id.target.image);
  CHECK(id.edited_styles == id.target_styles);

  req.params = EditParams{EditMode::kGlobal, 1.0, 0.0, 0.1};
  const auto full = edit(req, cat, g);
  CHECK(full.edited.image == full.reference.image);

  req.target = g.styles_for_seed(10);
  req.params = EditParams{EditMode::kSequential, 1.0, 3.0, 0.1};
  const auto from_styles = edit(req, cat, g);
  req.target = std::uint64_t{10};
  CHECK(edit(req, cat, g).edited.image == from_styles.edited.image);
  CHECK_FALSE(from_styles.edited.image == from_styles.target.image);
}
