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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ganlocal/catalog.hpp"
#include "ganlocal/error.hpp"
#include "ganlocal/npy.hpp"
#include "json.hpp"

using namespace ganlocal;
namespace fs = std::filesystem;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

SemanticCatalog small_catalog() {
  std::mt19937 gen(1);
  std::normal_distribution<float> d;
  semantics::CentroidMatrix cent{4, 3, {}};
  for (int i = 0; i < 12; ++i) cent.v.push_back(d(gen));
  semantics::normalize_rows(cent.v, 3);
  std::vector<int> labels(2 * 4 * 4);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>((i * 5 + i / 3) % 4);
  const ChannelMoments moments{{0.1, -0.2, 0.3}, {1.5, 0.25, 2.0}};
  auto c = make_catalog(2, cent, one_hot(labels, 2, 4, 4, 4), moments, Provenance{7, 2, 3, 100});
  std::map<int, semantics::AttributionMatrix> attr;
  for (int layer : {0, 2}) {
    semantics::AttributionMatrix m{4, 3, layer, {}};
    for (int i = 0; i < 12; ++i) m.m.push_back(0.25f + 0.01f * static_cast<float>(i % 3) - 0.005f * static_cast<float>(i / 3));
    attr[layer] = m;
  }
  return with_attributions(c, attr);
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ganlocal_test_catalog_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("make_catalog records labels, clusters and float-rounded moments") {
  const auto c = small_catalog();
  CHECK(c.k == 4);
  CHECK(c.base_layer_id == 2);
  CHECK(c.clusters.size() == 4);
  CHECK(c.base_h == 4);
  CHECK(c.base_labels.size() == 32);
  CHECK(c.base_labels[1] == 1);
  CHECK(c.base_moments.mean[0] == static_cast<double>(0.1f));
  CHECK(c.base_membership().tensor == one_hot(c.base_labels, 2, 4, 4, 4).tensor);
}

TEST_CASE("labels and merges produce new catalogs") {
  const auto c = small_catalog();
  const auto labelled = set_label(c, 1, "sky");
  CHECK(labelled.clusters[1].label == "sky");
  CHECK(c.clusters[1].label.empty());
  const auto merged = merge_clusters(labelled, {3, 1}, "top");
  REQUIRE(merged.parts.size() == 1);
  CHECK(merged.parts[0] == Part{0, "top", {1, 3}});
  CHECK(merged.clusters[1].merged_into == 0);
  const auto merged2 = merge_clusters(merged, {0}, "left");
  CHECK(merged2.parts[1].part_id == 1);

  CHECK(code_of([&] { merge_clusters(merged, {2, 3}, "again"); }) == ErrorCode::kAlreadyAssigned);
  CHECK(code_of([&] { merge_clusters(c, {9}, "x"); }) == ErrorCode::kUnknownCluster);
  CHECK(code_of([&] { set_label(c, -1, "x"); }) == ErrorCode::kUnknownCluster);
}

TEST_CASE("part selectors resolve ids, labels and unassigned clusters") {
  const auto c = merge_clusters(small_catalog(), {1, 3}, "top");
  CHECK(select_part(c, 0).members == std::vector<int>{1, 3});
  CHECK(select_part(c, "0").members == std::vector<int>{1, 3});
  CHECK(select_part(c, "top").part_id == 0);
  const auto single = select_part(c, "cluster:2");
  CHECK(single.members == std::vector<int>{2});
  CHECK_FALSE(single.part_id.has_value());
  CHECK(code_of([&] { select_part(c, "cluster:1"); }) == ErrorCode::kAlreadyAssigned);
  CHECK(code_of([&] { select_part(c, "cluster:x"); }) == ErrorCode::kUnknownCluster);
  CHECK(code_of([&] { select_part(c, "cluster:12"); }) == ErrorCode::kUnknownCluster);
  CHECK(code_of([&] { select_part(c, "nose"); }) == ErrorCode::kUnknownPart);
  CHECK(code_of([&] { select_part(c, 5); }) == ErrorCode::kUnknownPart);
}

TEST_CASE("part rows sum member rows and clamp to one") {
  auto c = merge_clusters(small_catalog(), {0, 2}, "pair");
  const auto row = part_row(c, 0, select_part(c, 0));
  const auto& m = c.attributions.at(0);
  for (std::size_t ch = 0; ch < 3; ++ch) CHECK(row[ch] == doctest::Approx(m.at(0, ch) + m.at(2, ch)));
  auto big = c.attributions;
  for (auto& v : big.at(2).m) v = 0.9f;
  c = with_attributions(c, big);
  for (double v : part_row(c, 2, select_part(c, 0))) CHECK(v == 1.0);
  CHECK(code_of([&] { part_row(c, 5, select_part(c, 0)); }) == ErrorCode::kMissingLayerAttribution);
}

TEST_CASE("roi groups list parts and free clusters by smallest member") {
  const auto c = merge_clusters(small_catalog(), {3, 1}, "top");
  const auto groups = roi_groups(c);
  CHECK(groups == std::vector<std::vector<int>>{{0}, {1, 3}, {2}});
}

TEST_CASE("save and load are field-equal and byte-stable") {
  auto c = merge_clusters(set_label(small_catalog(), 2, "ground"), {0, 3}, "frame");
  const auto a = temp_dir("a");
  const auto b = temp_dir("b");
  save_catalog(c, a);
  const auto loaded = load_catalog(a);
  CHECK(loaded == c);
  save_catalog(loaded, b);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  CHECK(slurp(a / "arrays.npz") == slurp(b / "arrays.npz"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("corrupt or incompatible catalogs are rejected") {
  const auto c = small_catalog();
  const auto dir = temp_dir("bad");
  save_catalog(c, dir);
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));

  auto write_manifest = [&](const nlohmann::json& j) { std::ofstream(dir / "manifest.json") << j.dump(); };
  auto versioned = manifest;
  versioned["schema_version"] = 99;
  write_manifest(versioned);
  CHECK(code_of([&] { load_catalog(dir); }) == ErrorCode::kSchemaVersionMismatch);

  auto missing = manifest;
  missing.erase("clusters");
  write_manifest(missing);
  CHECK(code_of([&] { load_catalog(dir); }) == ErrorCode::kSchemaVersionMismatch);

  write_manifest(manifest);
  auto arrays = npy::load_archive(dir / "arrays.npz");
  arrays["centroids"].data[0] += 1.0f;
  npy::save_archive(dir / "arrays.npz", arrays);
  CHECK(code_of([&] { load_catalog(dir); }) == ErrorCode::kIoError);

  CHECK(code_of([&] { load_catalog(temp_dir("missing")); }) == ErrorCode::kIoError);
  fs::remove_all(dir);
}
