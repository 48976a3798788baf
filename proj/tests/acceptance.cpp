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

// Acceptance suite: one PASS/FAIL line per criterion. Criterion 6 is
// reported but does not affect the exit status; every other failure does.
// Artifacts (CSV and SVG for the locality trade-off) are written to
// $GANLOCAL_ACCEPTANCE_OUT or ./acceptance_out.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ganlocal/catalog.hpp"
#include "ganlocal/editor.hpp"
#include "ganlocal/error.hpp"
#include "ganlocal/metrics.hpp"
#include "ganlocal/npy.hpp"
#include "ganlocal/pipeline.hpp"
#include "ganlocal/semantics.hpp"
#include "oracles.hpp"

using namespace ganlocal;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int hard_failures = 0;

void report(int id, bool pass, const std::string& detail, bool soft = false) {
  std::printf("[%s] criterion %d%s: %s\n", pass ? "PASS" : "FAIL", id, soft ? " (soft)" : "", detail.c_str());
  std::fflush(stdout);
  if (!pass && !soft) ++hard_failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

fs::path out_dir() {
  const char* env = std::getenv("GANLOCAL_ACCEPTANCE_OUT");
  fs::path p = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("acceptance_out");
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------- 1 and 2

struct Instance {
  std::vector<double> m;
  double epsilon = 0.0;
};

std::vector<Instance> sequential_instances() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0), eps(0.0, 4.0);
  std::vector<Instance> out(1000);
  for (auto& inst : out) {
    inst.m.resize(16);
    for (auto& v : inst.m) v = unit(gen);
    inst.epsilon = eps(gen);
  }
  return out;
}

void criterion1(const std::vector<Instance>& instances) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& inst : instances) {
    const auto q = editor::query_sequential(inst.m, inst.epsilon, 0.1).q;
    const auto lp = oracle::knapsack_lp(inst.m, inst.epsilon, 0.1);
    for (std::size_t c = 0; c < q.size(); ++c) worst = std::max(worst, std::abs(q[c] - lp[c]));
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-9 && secs < 5.0,
         fmt("1000 instances, max |q - q_LP| = %.3g (tol 1e-9), %.3f s (limit 5 s)", worst, secs));
}

void criterion2(const std::vector<Instance>& instances) {
  const std::vector<double> grid{0.0, 0.05, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0};
  double worst_excess = -1e300;
  std::size_t nesting_violations = 0, checks = 0;
  for (const auto& inst : instances) {
    std::vector<double> eps = grid;
    eps.push_back(inst.epsilon);
    std::sort(eps.begin(), eps.end());
    std::vector<std::vector<double>> qs;
    for (double e : eps) {
      qs.push_back(editor::query_sequential(inst.m, e, 0.1).q);
      worst_excess = std::max(worst_excess, editor::budget_used(qs.back(), inst.m) - e);
    }
    for (std::size_t i = 0; i < qs.size(); ++i)
      for (std::size_t j = i + 1; j < qs.size(); ++j) {
        ++checks;
        for (std::size_t c = 0; c < inst.m.size(); ++c) {
          if (qs[i][c] > 0.0 && qs[j][c] == 0.0) {
            ++nesting_violations;
            break;
          }
        }
      }
  }
  report(2, worst_excess <= 1e-9 && nesting_violations == 0,
         fmt("max budget excess %.3g (tol 1e-9); support nesting violations %.0f of %.0f epsilon pairs", worst_excess,
             static_cast<double>(nesting_violations), static_cast<double>(checks)));
}

// ---------------------------------------------------------------- 3

struct CatalogRun {
  minigen::Generator generator{minigen::GeneratorConfig{}};
  SemanticCatalog catalog;
  double seconds = 0.0;
};

CatalogRun criterion3() {
  CatalogRun run;
  const auto t0 = Clock::now();
  const auto batch = pipeline::render_batch(run.generator, 0, 200, minigen::all_layers(run.generator.config()));
  auto outcome = pipeline::catalog_from_captures(batch.captures, 5, semantics::KMeansOptions{15, 0, 100, 1e-5},
                                                 Provenance{0, 200, 0, 0});
  run.catalog = std::move(outcome.catalog);
  run.seconds = seconds_since(t0);

  // Catalog attribution: hard memberships at the 32x32 layers, bilinearly
  // resampled soft memberships elsewhere.
  double worst_catalog = 0.0;
  std::size_t channels = 0;
  for (const auto& [layer, m] : run.catalog.attributions) {
    for (std::size_t c = 0; c < m.c; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < m.k; ++k) s += m.at(k, c);
      worst_catalog = std::max(worst_catalog, std::abs(s - 1.0));
      ++channels;
    }
  }
  // Hard memberships at every layer: argmax of the resampled membership.
  const auto base = run.catalog.base_membership();
  double worst_hard = 0.0;
  std::size_t hard_layers = 0;
  for (const auto& [layer, cap] : batch.captures) {
    const auto& s = cap.tensor.shape();
    const auto soft = resample_membership(base, s.h, s.w);
    std::vector<int> labels(s.n * s.plane());
    for (std::size_t n = 0; n < s.n; ++n)
      for (std::size_t p = 0; p < s.plane(); ++p) {
        std::size_t arg = 0;
        for (std::size_t k = 1; k < run.catalog.k; ++k)
          if (soft.tensor.plane(n, k)[p] > soft.tensor.plane(n, arg)[p]) arg = k;
        labels[n * s.plane() + p] = static_cast<int>(arg);
      }
    const auto m = semantics::channel_attribution(standardize(cap), one_hot(labels, s.n, run.catalog.k, s.h, s.w));
    for (std::size_t c = 0; c < m.c; ++c) {
      double sum = 0.0;
      for (std::size_t k = 0; k < m.k; ++k) sum += m.at(k, c);
      worst_hard = std::max(worst_hard, std::abs(sum - 1.0));
    }
    ++hard_layers;
  }
  const bool all_layers = run.catalog.attributions.size() == run.generator.config().layers();
  report(3, all_layers && worst_catalog <= 1e-4 && worst_hard <= 1e-4 && run.seconds < 60.0,
         fmt("N=200 K=15 base 32x32: max |sum_k M - 1| soft/resampled %.3g, hard %.3g (tol 1e-4) over %.0f channels; "
             "catalog build %.1f s (limit 60 s)",
             worst_catalog, worst_hard, static_cast<double>(channels), run.seconds));
  return run;
}

// ---------------------------------------------------------------- 4

void criterion4(const CatalogRun& run) {
  const auto& cat = run.catalog;
  std::size_t full_channels = 0;
  for (const auto& [layer, m] : cat.attributions)
    for (float v : m.m)
      if (v >= 1.0f) ++full_channels;
  std::size_t identity_ok = 0, transfer_ok = 0, trials = 0;
  const auto parts = pipeline::default_parts(cat);
  for (std::size_t i = 0; i < 10; ++i) {
    editor::EditRequest req;
    req.target = std::uint64_t{7000 + 2 * i};
    req.reference = std::uint64_t{7001 + 2 * i};
    req.part = parts[i % parts.size()];
    req.params = editor::EditParams{editor::EditMode::kSequential, 1.0, 0.0, 0.1};
    const auto id = editor::edit(req, cat, run.generator);
    if (id.edited.image == id.target.image) ++identity_ok;
    // q = 1 at every layer, built explicitly.
    std::map<int, editor::QueryVector> ones;
    for (std::size_t l = 0; l < run.generator.config().layers(); ++l) {
      ones[static_cast<int>(l)] = editor::QueryVector{static_cast<int>(l),
                                                      std::vector<double>(run.generator.config().widths[l], 1.0)};
    }
    const auto full = run.generator.synthesize(editor::apply_queries(id.target_styles, id.reference_styles, ones));
    if (full.image == id.reference.image) ++transfer_ok;
    ++trials;
  }
  report(4, full_channels == 0 && identity_ok == trials && transfer_ok == trials,
         fmt("channels with M=1: %.0f; epsilon=0 bit-identical to target %.0f/%.0f;", static_cast<double>(full_channels),
             static_cast<double>(identity_ok), static_cast<double>(trials)) +
             fmt(" q=1 bit-identical to reference %.0f/%.0f", static_cast<double>(transfer_ok),
                 static_cast<double>(trials)));
}

// ---------------------------------------------------------------- 5

void criterion5() {
  std::mt19937 gen(55);
  std::normal_distribution<float> nd;
  std::size_t monotone_fail = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 300 + static_cast<std::size_t>(inst) * 7;
    const std::size_t dim = 3 + static_cast<std::size_t>(inst % 10);
    std::vector<float> rows(n * dim);
    for (auto& v : rows) v = nd(gen);
    semantics::normalize_rows(rows, dim);
    const auto km = semantics::spherical_kmeans_rows(
        rows, dim, semantics::KMeansOptions{2 + static_cast<std::size_t>(inst % 8), static_cast<std::uint64_t>(inst), 100, 0.0});
    for (std::size_t i = 1; i < km.objective.size(); ++i)
      if (km.objective[i] < km.objective[i - 1]) {
        ++monotone_fail;
        break;
      }
  }

  // Three orthogonal clusters.
  std::vector<float> rows;
  std::vector<int> truth;
  std::normal_distribution<float> noise(0.0f, 0.05f);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 10; ++j) rows.push_back((j == c ? 1.0f : 0.0f) + noise(gen));
      truth.push_back(c);
    }
  semantics::normalize_rows(rows, 10);
  const auto km = semantics::spherical_kmeans_rows(rows, 10, semantics::KMeansOptions{3, 0, 100, 1e-5});
  const double ari = oracle::adjusted_rand(km.labels, truth);

  // Determinism across runs and thread counts on a pipeline-sized problem.
  std::vector<float> big(60000 * 24);
  for (auto& v : big) v = nd(gen);
  semantics::normalize_rows(big, 24);
  const semantics::KMeansOptions opt{15, 3, 30, 1e-5};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto ref = semantics::spherical_kmeans_rows(big, 24, opt);
  bool deterministic = true;
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    const auto again = semantics::spherical_kmeans_rows(big, 24, opt);
    deterministic = deterministic && again.labels == ref.labels && again.centroids == ref.centroids;
  }
  omp_set_num_threads(saved);
  report(5, monotone_fail == 0 && ari == 1.0 && deterministic,
         fmt("objective decreases in %.0f/100 instances; ARI on 3 orthogonal clusters %.6f; bitwise determinism "
             "across runs and 1/2/4/7 threads: ",
             static_cast<double>(monotone_fail), ari) +
             (deterministic ? "yes" : "no"));
}

// ---------------------------------------------------------------- 6

struct SweepPoint {
  double param = 0.0;
  double in_mse = 0.0;
  double out_mse = 0.0;
  std::vector<pipeline::PairEvaluation> pairs;
};

SweepPoint evaluate(const CatalogRun& run, const std::vector<pipeline::PreparedPair>& pairs, editor::EditMode mode,
                    double param) {
  editor::EditParams p;
  p.mode = mode;
  (mode == editor::EditMode::kSequential ? p.epsilon : p.lambda) = param;
  SweepPoint sp;
  sp.param = param;
  for (const auto& pair : pairs) {
    auto ev = pipeline::evaluate_pair(run.generator, run.catalog, pair, p);
    sp.in_mse += *ev.locality.in_mse;
    sp.out_mse += *ev.locality.out_mse;
    sp.pairs.push_back(std::move(ev));
  }
  sp.in_mse /= static_cast<double>(pairs.size());
  sp.out_mse /= static_cast<double>(pairs.size());
  return sp;
}

void write_svg(const fs::path& path, const std::vector<SweepPoint>& seq, const std::vector<SweepPoint>& sim) {
  double max_x = 1e-9, max_y = 1e-9;
  for (const auto* s : {&seq, &sim})
    for (const auto& p : *s) {
      max_x = std::max(max_x, p.in_mse);
      max_y = std::max(max_y, p.out_mse);
    }
  const double w = 560, h = 400, m = 60;
  auto px = [&](double x) { return m + (w - 2 * m) * x / max_x; };
  auto py = [&](double y) { return h - m - (h - 2 * m) * y / max_y; };
  std::ofstream f(path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">mean In-MSE (max "
    << std::setprecision(4) << max_x << ")</text>\n"
    << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
    << ")\" text-anchor=\"middle\">mean Out-MSE (max " << max_y << ")</text>\n";
  auto series = [&](const std::vector<SweepPoint>& s, const char* color, const char* name, double ly) {
    std::vector<const SweepPoint*> sorted;
    for (const auto& p : s) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->in_mse < b->in_mse; });
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto* p : sorted) f << px(p->in_mse) << "," << py(p->out_mse) << " ";
    f << "\"/>\n";
    for (const auto* p : sorted)
      f << "<circle cx=\"" << px(p->in_mse) << "\" cy=\"" << py(p->out_mse) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    f << "<text x=\"" << m + 10 << "\" y=\"" << ly << "\" fill=\"" << color << "\">" << name << "</text>\n";
  };
  series(seq, "#d62728", "sequential (epsilon sweep)", m + 10);
  series(sim, "#1f77b4", "simultaneous (lambda sweep)", m + 28);
  f << "</svg>\n";
}

void criterion6(const CatalogRun& run) {
  const auto t0 = Clock::now();
  const auto candidates = pipeline::default_parts(run.catalog);
  std::vector<pipeline::PreparedPair> pairs;
  for (std::size_t i = 0; pairs.size() < 100 && i < 400; ++i) {
    auto p = pipeline::prepare_pair_auto(run.generator, run.catalog, i, 100000 + 2 * i, 100001 + 2 * i, candidates);
    if (p) pairs.push_back(std::move(*p));
  }
  if (pairs.size() < 100) {
    report(6, false, "fewer than 100 pairs with a partial ROI", true);
    return;
  }

  std::vector<SweepPoint> seq, sim;
  std::vector<std::pair<std::size_t, std::size_t>> matched;  // (seq index, sim index)
  for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    seq.push_back(evaluate(run, pairs, editor::EditMode::kSequential, eps));
  }
  // For each sequential level, bisect lambda until the simultaneous mean
  // In-MSE is within 2% of it (the criterion allows 5%).
  for (std::size_t si = 0; si < seq.size(); ++si) {
    const double target = seq[si].in_mse;
    auto rel_gap = [&](std::size_t i) { return (sim[i].in_mse - target) / target; };
    double lo = 0.0, hi = 64.0;
    std::size_t best = 0;
    bool have_best = false;
    for (int it = 0; it < 16; ++it) {
      const double mid = 0.5 * (lo + hi);
      sim.push_back(evaluate(run, pairs, editor::EditMode::kSimultaneous, mid));
      const std::size_t cur = sim.size() - 1;
      if (!have_best || std::abs(rel_gap(cur)) < std::abs(rel_gap(best))) {
        best = cur;
        have_best = true;
      }
      if (std::abs(rel_gap(cur)) <= 0.02) break;
      (rel_gap(cur) < 0 ? lo : hi) = mid;
    }
    matched.emplace_back(si, best);
  }

  const fs::path dir = out_dir();
  {
    std::ofstream pairs_csv(dir / "locality_pairs.csv");
    pairs_csv << std::setprecision(17) << "mode,epsilon_or_lambda,pair_id,part_id,in_mse,out_mse\n";
    auto dump = [&](const std::vector<SweepPoint>& pts, const char* mode) {
      for (const auto& sp : pts)
        for (std::size_t i = 0; i < pairs.size(); ++i)
          pairs_csv << mode << ',' << sp.param << ',' << pairs[i].pair_id << ',' << pairs[i].part.name << ','
                    << *sp.pairs[i].locality.in_mse << ',' << *sp.pairs[i].locality.out_mse << '\n';
    };
    dump(seq, "sequential");
    dump(sim, "simultaneous");
  }
  std::ofstream summary(dir / "locality_matched.csv");
  summary << std::setprecision(10)
          << "epsilon,lambda,in_mse_sequential,in_mse_simultaneous,in_mse_rel_gap,out_mse_sequential,out_mse_simultaneous\n";
  std::size_t valid = 0, wins = 0;
  std::string detail;
  for (const auto& [si, bi] : matched) {
    const SweepPoint* s = &seq[si];
    const SweepPoint* b = &sim[bi];
    const double gap = (b->in_mse - s->in_mse) / s->in_mse;
    summary << s->param << ',' << b->param << ',' << s->in_mse << ',' << b->in_mse << ',' << gap << ',' << s->out_mse
            << ',' << b->out_mse << '\n';
    if (std::abs(gap) > 0.05) continue;
    ++valid;
    if (s->out_mse <= b->out_mse) ++wins;
    detail += fmt(" [eps %.1f vs lambda %.3f: Out %.1f vs %.1f]", s->param, b->param, s->out_mse, b->out_mse);
  }
  write_svg(dir / "locality_tradeoff.svg", seq, sim);
  const bool pass = valid > 0 && wins == valid;
  report(6, pass,
         fmt("%.0f pairs, %.0f/%.0f matched In-MSE levels (+-5%%) with Out-MSE(seq) <= Out-MSE(sim);",
             static_cast<double>(pairs.size()), static_cast<double>(wins), static_cast<double>(valid)) +
             detail + fmt(" %.0f s; CSV/SVG in ", seconds_since(t0)) + dir.string(),
         true);
}

// ---------------------------------------------------------------- 7

void criterion7() {
  const auto white = metrics::srgb_to_lab(1, 1, 1);
  const auto black = metrics::srgb_to_lab(0, 0, 0);
  const double white_err = std::max({std::abs(white[0] - 100.0), std::abs(white[1]), std::abs(white[2])});
  const double black_err = std::max({std::abs(black[0]), std::abs(black[1]), std::abs(black[2])});

  std::mt19937 gen(77);
  std::normal_distribution<double> nd;
  auto stats = [&](std::size_t d, std::size_t n, double shift) {
    std::vector<std::vector<double>> f(n, std::vector<double>(d));
    for (auto& row : f) {
      const double common = nd(gen);
      for (std::size_t j = 0; j < d; ++j) row[j] = shift + nd(gen) + 0.7 * common * static_cast<double>(j % 3);
    }
    return metrics::gaussian_stats(f);
  };
  double self_worst = 0.0, sym_worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto a = stats(8, 64, 0.0);
    const auto b = stats(8, 48, 0.4);
    self_worst = std::max(self_worst, std::abs(metrics::frechet_distance(a, a)));
    sym_worst = std::max(sym_worst, std::abs(metrics::frechet_distance(a, b) - metrics::frechet_distance(b, a)));
  }
  const metrics::GaussianStats p{2, {0, 0}, {1, 0, 0, 1}};
  const metrics::GaussianStats q{2, {3, 4}, {1, 0, 0, 1}};
  const double shift_err = std::abs(metrics::frechet_distance(p, q) - 25.0);
  report(7, white_err <= 0.01 && black_err <= 0.01 && self_worst <= 1e-8 && shift_err <= 1e-6 && sym_worst <= 1e-6,
         fmt("white err %.2g, black err %.2g (tol 0.01); F(s,s) max %.2g (tol 1e-8); mean shift (3,4) err %.2g (tol 1e-6)",
             white_err, black_err, self_worst, shift_err) +
             fmt("; asymmetry max %.2g (tol 1e-6)", sym_worst));
}

// ---------------------------------------------------------------- 8

void criterion8(const SemanticCatalog& catalog) {
  const fs::path data(GANLOCAL_TEST_DATA);
  std::mt19937 gen(88);
  std::normal_distribution<float> nd;
  bool arrays_ok = true;
  for (const auto& shape : std::vector<std::vector<std::size_t>>{{}, {7}, {3, 5}, {2, 3, 4}, {2, 1, 3, 8}, {0, 4}}) {
    NdArray a{shape, {}};
    a.data.resize(a.count());
    for (auto& v : a.data) v = nd(gen);
    const auto bytes = npy::write_array_file(a);
    const auto back = npy::read_array_file(bytes);
    arrays_ok = arrays_ok && back == a && npy::write_array_file(back) == bytes;
  }
  for (const char* name : {"ref_f4_2x3.npy", "ref_f4_rank4.npy"}) {
    const auto bytes = npy::read_file(data / name);
    arrays_ok = arrays_ok && npy::write_array_file(npy::read_array_file(bytes)) == bytes;
  }

  npy::ArrayMap arrays = npy::load_archive(data / "ref_archive.npz");
  for (const auto& [k, v] : npy::load_archive(data / "ref_archive_deflate.npz")) arrays["deflate_" + k] = v;
  const auto zip = npy::write_archive(arrays);
  const bool archive_ok = npy::read_archive(zip) == arrays && npy::write_archive(npy::read_archive(zip)) == zip;

  bool fortran_rejected = false;
  try {
    npy::load_array(data / "ref_fortran.npy");
  } catch (const Error& e) {
    fortran_rejected = e.code() == ErrorCode::kUnsupportedLayout;
  }

  const fs::path dir = out_dir() / "catalog_roundtrip";
  fs::remove_all(dir);
  const auto edited = merge_clusters(set_label(catalog, 0, "background"), {1, 4}, "part-a");
  save_catalog(edited, dir);
  const bool catalog_ok = load_catalog(dir) == edited;
  report(8, arrays_ok && archive_ok && fortran_rejected && catalog_ok,
         std::string("array round-trip bit-exact: ") + (arrays_ok ? "yes" : "no") +
             "; archive round-trip bit-exact: " + (archive_ok ? "yes" : "no") +
             "; column-major rejected: " + (fortran_rejected ? "yes" : "no") +
             "; catalog save/load field-equal: " + (catalog_ok ? "yes" : "no"));
}

}  // namespace

int main() {
  try {
    const auto instances = sequential_instances();
    criterion1(instances);
    criterion2(instances);
    const auto run = criterion3();
    criterion4(run);
    criterion5();
    criterion6(run);
    criterion7();
    criterion8(run.catalog);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d hard failure(s)\n", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
