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

#include "ganlocal/catalog.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "json.hpp"

#include "ganlocal/error.hpp"
#include "ganlocal/npy.hpp"

namespace ganlocal {
namespace {

using nlohmann::json;

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kArraysName = "arrays.npz";

[[noreturn]] void schema_error(const std::string& why) {
  throw Error(ErrorCode::kSchemaVersionMismatch, "catalog manifest: " + why);
}

std::string attribution_key(int layer) { return "attribution_l" + std::to_string(layer); }

const ClusterInfo& cluster_or_throw(const SemanticCatalog& c, int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= c.clusters.size()) {
    throw Error(ErrorCode::kUnknownCluster, "unknown cluster " + std::to_string(id));
  }
  return c.clusters[static_cast<std::size_t>(id)];
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing '") + key + "'");
  return j.at(key);
}

}  // namespace

MembershipTensor SemanticCatalog::base_membership() const {
  const std::size_t plane = base_h * base_w;
  const std::size_t n = plane == 0 ? 0 : base_labels.size() / plane;
  return one_hot(base_labels, n, k, base_h, base_w);
}

const Part* SemanticCatalog::find_part(int part_id) const {
  for (const auto& p : parts) {
    if (p.part_id == part_id) return &p;
  }
  return nullptr;
}

const Part* SemanticCatalog::find_part(const std::string& label) const {
  for (const auto& p : parts) {
    if (p.label == label) return &p;
  }
  return nullptr;
}

SemanticCatalog make_catalog(int base_layer_id, semantics::CentroidMatrix centroids,
                             const MembershipTensor& base_membership, const ChannelMoments& base_moments,
                             Provenance provenance) {
  const auto& s = base_membership.tensor.shape();
  if (s.c != centroids.k) throw Error(ErrorCode::kShapeMismatch, "catalog: membership K differs from centroids");
  SemanticCatalog c;
  c.base_layer_id = base_layer_id;
  c.k = centroids.k;
  c.centroids = std::move(centroids);
  c.provenance = provenance;
  c.base_h = s.h;
  c.base_w = s.w;
  for (std::size_t i = 0; i < c.k; ++i) c.clusters.push_back(ClusterInfo{static_cast<int>(i), "", std::nullopt});
  c.base_labels.resize(s.n * s.plane());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t p = 0; p < s.plane(); ++p) {
      std::size_t arg = 0;
      for (std::size_t kk = 1; kk < s.c; ++kk) {
        if (base_membership.tensor.plane(n, kk)[p] > base_membership.tensor.plane(n, arg)[p]) arg = kk;
      }
      c.base_labels[n * s.plane() + p] = static_cast<int>(arg);
    }
  }
  for (double v : base_moments.mean) c.base_moments.mean.push_back(static_cast<float>(v));
  for (double v : base_moments.stddev) c.base_moments.stddev.push_back(static_cast<float>(v));
  return c;
}

SemanticCatalog set_label(const SemanticCatalog& catalog, int cluster_id, const std::string& label) {
  cluster_or_throw(catalog, cluster_id);
  SemanticCatalog out = catalog;
  out.clusters[static_cast<std::size_t>(cluster_id)].label = label;
  return out;
}

SemanticCatalog merge_clusters(const SemanticCatalog& catalog, const std::vector<int>& cluster_ids,
                               const std::string& part_label) {
  if (cluster_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "merge: no clusters given");
  std::set<int> ids(cluster_ids.begin(), cluster_ids.end());
  for (int id : ids) {
    const auto& info = cluster_or_throw(catalog, id);
    if (info.merged_into) {
      throw Error(ErrorCode::kAlreadyAssigned, "cluster " + std::to_string(id) + " already belongs to part " +
                                                   std::to_string(*info.merged_into));
    }
  }
  SemanticCatalog out = catalog;
  int next_id = 0;
  for (const auto& p : out.parts) next_id = std::max(next_id, p.part_id + 1);
  Part part{next_id, part_label, std::vector<int>(ids.begin(), ids.end())};
  for (int id : part.members) out.clusters[static_cast<std::size_t>(id)].merged_into = next_id;
  out.parts.push_back(std::move(part));
  return out;
}

SemanticCatalog with_attributions(const SemanticCatalog& catalog,
                                  std::map<int, semantics::AttributionMatrix> attributions) {
  for (const auto& [layer, m] : attributions) {
    if (m.k != catalog.k) throw Error(ErrorCode::kShapeMismatch, "attribution rows differ from K");
  }
  SemanticCatalog out = catalog;
  for (auto& [layer, m] : attributions) out.attributions[layer] = std::move(m);
  return out;
}

PartSelection select_part(const SemanticCatalog& catalog, int part_id) {
  const Part* p = catalog.find_part(part_id);
  if (p == nullptr) throw Error(ErrorCode::kUnknownPart, "unknown part " + std::to_string(part_id));
  return PartSelection{p->label.empty() ? "part-" + std::to_string(p->part_id) : p->label, p->part_id, p->members};
}

PartSelection select_part(const SemanticCatalog& catalog, const std::string& spec) {
  if (!spec.empty() && std::all_of(spec.begin(), spec.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    return select_part(catalog, std::stoi(spec));
  }
  if (spec.rfind("cluster:", 0) == 0) {
    const std::string rest = spec.substr(8);
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      throw Error(ErrorCode::kUnknownCluster, "bad cluster selector '" + spec + "'");
    }
    const int id = std::stoi(rest);
    const auto& info = cluster_or_throw(catalog, id);
    if (info.merged_into) {
      throw Error(ErrorCode::kAlreadyAssigned, "cluster " + rest + " is part of part " + std::to_string(*info.merged_into));
    }
    return PartSelection{spec, std::nullopt, {id}};
  }
  if (const Part* p = catalog.find_part(spec)) return select_part(catalog, p->part_id);
  throw Error(ErrorCode::kUnknownPart, "unknown part '" + spec + "'");
}

std::vector<double> part_row(const SemanticCatalog& catalog, int layer, const PartSelection& part) {
  auto it = catalog.attributions.find(layer);
  if (it == catalog.attributions.end()) {
    throw Error(ErrorCode::kMissingLayerAttribution, "no attribution for layer " + std::to_string(layer));
  }
  const auto& m = it->second;
  std::vector<double> row(m.c, 0.0);
  for (int id : part.members) {
    if (id < 0 || static_cast<std::size_t>(id) >= m.k) throw Error(ErrorCode::kUnknownCluster, "part member out of range");
    const auto r = m.row(static_cast<std::size_t>(id));
    for (std::size_t c = 0; c < m.c; ++c) row[c] += r[c];
  }
  for (auto& v : row) v = std::clamp(v, 0.0, 1.0);
  return row;
}

std::vector<std::vector<int>> roi_groups(const SemanticCatalog& catalog) {
  std::vector<std::vector<int>> groups;
  for (const auto& p : catalog.parts) groups.push_back(p.members);
  for (const auto& c : catalog.clusters) {
    if (!c.merged_into) groups.push_back({c.id});
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return *std::min_element(a.begin(), a.end()) <
                                                      *std::min_element(b.begin(), b.end()); });
  return groups;
}

void save_catalog(const SemanticCatalog& catalog, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  npy::ArrayMap arrays;
  arrays["centroids"] = NdArray{{catalog.centroids.k, catalog.centroids.dim}, catalog.centroids.v};
  for (const auto& [layer, m] : catalog.attributions) {
    arrays[attribution_key(layer)] = NdArray{{m.k, m.c}, m.m};
  }
  const std::size_t plane = catalog.base_h * catalog.base_w;
  const std::size_t n = plane == 0 ? 0 : catalog.base_labels.size() / plane;
  NdArray labels{{n, catalog.base_h, catalog.base_w}, {}};
  labels.data.reserve(catalog.base_labels.size());
  for (int l : catalog.base_labels) labels.data.push_back(static_cast<float>(l));
  arrays["membership_base"] = std::move(labels);
  auto to_float = [](const std::vector<double>& v) { return std::vector<float>(v.begin(), v.end()); };
  arrays["base_mean"] = NdArray{{catalog.base_moments.mean.size()}, to_float(catalog.base_moments.mean)};
  arrays["base_std"] = NdArray{{catalog.base_moments.stddev.size()}, to_float(catalog.base_moments.stddev)};
  const auto bytes = npy::write_archive(arrays);

  json manifest;
  manifest["schema_version"] = kCatalogSchemaVersion;
  manifest["base_layer_id"] = catalog.base_layer_id;
  manifest["k"] = catalog.k;
  manifest["base_size"] = {catalog.base_h, catalog.base_w};
  manifest["clusters"] = json::array();
  for (const auto& c : catalog.clusters) {
    manifest["clusters"].push_back(
        {{"id", c.id}, {"label", c.label}, {"merged_into", c.merged_into ? json(*c.merged_into) : json(nullptr)}});
  }
  manifest["parts"] = json::array();
  for (const auto& p : catalog.parts) {
    manifest["parts"].push_back({{"part_id", p.part_id}, {"label", p.label}, {"members", p.members}});
  }
  manifest["provenance"] = {{"kmeans_seed", catalog.provenance.kmeans_seed},
                            {"sample_count", catalog.provenance.sample_count},
                            {"generator_seed", catalog.provenance.generator_seed},
                            {"first_sample_seed", catalog.provenance.first_sample_seed}};
  manifest["attributions"] = json::array();
  for (const auto& [layer, m] : catalog.attributions) manifest["attributions"].push_back(layer);
  manifest["arrays"] = kArraysName;
  manifest["arrays_crc32"] = crc32(0L, bytes.data(), static_cast<uInt>(bytes.size()));

  npy::write_file(dir / kArraysName, bytes);
  const std::string text = manifest.dump(2) + "\n";
  npy::write_file(dir / kManifestName,
                  std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

SemanticCatalog load_catalog(const std::filesystem::path& dir) {
  const auto raw = npy::read_file(dir / kManifestName);
  json manifest;
  try {
    manifest = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    schema_error(std::string("not valid JSON: ") + e.what());
  }
  try {
    if (require(manifest, "schema_version").get<int>() != kCatalogSchemaVersion) {
      schema_error("unsupported schema_version " + manifest["schema_version"].dump());
    }
    SemanticCatalog c;
    c.base_layer_id = require(manifest, "base_layer_id").get<int>();
    c.k = require(manifest, "k").get<std::size_t>();
    const auto& size = require(manifest, "base_size");
    c.base_h = size.at(0).get<std::size_t>();
    c.base_w = size.at(1).get<std::size_t>();
    for (const auto& jc : require(manifest, "clusters")) {
      ClusterInfo info{require(jc, "id").get<int>(), require(jc, "label").get<std::string>(), std::nullopt};
      if (!require(jc, "merged_into").is_null()) info.merged_into = jc["merged_into"].get<int>();
      c.clusters.push_back(std::move(info));
    }
    for (const auto& jp : require(manifest, "parts")) {
      c.parts.push_back(Part{require(jp, "part_id").get<int>(), require(jp, "label").get<std::string>(),
                             require(jp, "members").get<std::vector<int>>()});
    }
    const auto& prov = require(manifest, "provenance");
    c.provenance.kmeans_seed = require(prov, "kmeans_seed").get<std::uint64_t>();
    c.provenance.sample_count = require(prov, "sample_count").get<std::size_t>();
    c.provenance.generator_seed = require(prov, "generator_seed").get<std::uint64_t>();
    c.provenance.first_sample_seed = require(prov, "first_sample_seed").get<std::uint64_t>();
    const auto layers = require(manifest, "attributions").get<std::vector<int>>();
    const auto arrays_name = require(manifest, "arrays").get<std::string>();
    const auto expected_crc = require(manifest, "arrays_crc32").get<std::uint64_t>();

    const auto bytes = npy::read_file(dir / arrays_name);
    if (crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())) != expected_crc) {
      throw Error(ErrorCode::kIoError, "catalog arrays do not match the manifest checksum");
    }
    const auto arrays = npy::read_archive(bytes);
    auto array = [&](const std::string& key) -> const NdArray& {
      auto it = arrays.find(key);
      if (it == arrays.end()) schema_error("arrays archive lacks '" + key + "'");
      return it->second;
    };
    const auto& cent = array("centroids");
    if (cent.shape.size() != 2 || cent.shape[0] != c.k) schema_error("centroids shape");
    c.centroids = semantics::CentroidMatrix{cent.shape[0], cent.shape[1], cent.data};
    for (int layer : layers) {
      const auto& m = array(attribution_key(layer));
      if (m.shape.size() != 2 || m.shape[0] != c.k) schema_error("attribution shape for layer " + std::to_string(layer));
      c.attributions[layer] = semantics::AttributionMatrix{m.shape[0], m.shape[1], layer, m.data};
    }
    for (float v : array("membership_base").data) c.base_labels.push_back(static_cast<int>(v));
    for (float v : array("base_mean").data) c.base_moments.mean.push_back(v);
    for (float v : array("base_std").data) c.base_moments.stddev.push_back(v);
    if (c.clusters.size() != c.k) schema_error("cluster list length differs from k");
    return c;
  } catch (const json::exception& e) {
    schema_error(std::string("bad field: ") + e.what());
  }
}

}  // namespace ganlocal
