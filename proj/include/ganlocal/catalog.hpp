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

#pragma once

// The semantic catalog: one clustering of a generator's base layer plus the
// human-supplied cluster labels and cluster-to-part merges, and per-layer
// attribution matrices. Values are immutable; edits return new catalogs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ganlocal/ndio.hpp"
#include "ganlocal/semantics.hpp"

namespace ganlocal {

inline constexpr int kCatalogSchemaVersion = 1;
inline constexpr std::size_t kDefaultSampleCount = 200;

struct ClusterInfo {
  int id = 0;
  std::string label;
  std::optional<int> merged_into;  // part id

  bool operator==(const ClusterInfo&) const = default;
};

struct Part {
  int part_id = 0;
  std::string label;
  std::vector<int> members;  // sorted cluster ids

  bool operator==(const Part&) const = default;
};

struct Provenance {
  std::uint64_t kmeans_seed = 0;
  std::size_t sample_count = kDefaultSampleCount;
  std::uint64_t generator_seed = 0;
  std::uint64_t first_sample_seed = 0;  // samples use seeds first .. first+N-1

  bool operator==(const Provenance&) const = default;
};

struct SemanticCatalog {
  int base_layer_id = 0;
  std::size_t k = 0;
  semantics::CentroidMatrix centroids;
  std::vector<ClusterInfo> clusters;
  std::vector<Part> parts;
  // Cluster-level (K rows) attribution per layer; part rows are derived.
  std::map<int, semantics::AttributionMatrix> attributions;
  Provenance provenance;
  // Moments of the base-layer batch, used to standardize new captures
  // before assigning them to centroids. Stored at float precision.
  ChannelMoments base_moments;
  // Hard base-layer labels of the clustered batch, (N, H, W).
  std::vector<int> base_labels;
  std::size_t base_h = 0;
  std::size_t base_w = 0;

  bool operator==(const SemanticCatalog&) const = default;

  MembershipTensor base_membership() const;
  const Part* find_part(int part_id) const;
  const Part* find_part(const std::string& label) const;
};

// A set of clusters treated as one region: an explicit part, or a single
// cluster not yet merged into any part.
struct PartSelection {
  std::string name;
  std::optional<int> part_id;
  std::vector<int> members;
};

SemanticCatalog make_catalog(int base_layer_id, semantics::CentroidMatrix centroids,
                             const MembershipTensor& base_membership,
                             const ChannelMoments& base_moments, Provenance provenance);

SemanticCatalog set_label(const SemanticCatalog& catalog, int cluster_id, const std::string& label);

// Adds a part made of the given unassigned clusters. Throws UnknownCluster
// or AlreadyAssigned.
SemanticCatalog merge_clusters(const SemanticCatalog& catalog, const std::vector<int>& cluster_ids,
                               const std::string& part_label);

SemanticCatalog with_attributions(const SemanticCatalog& catalog,
                                  std::map<int, semantics::AttributionMatrix> attributions);

PartSelection select_part(const SemanticCatalog& catalog, int part_id);
// Accepts a part id, a part label, or "cluster:<k>" for an unassigned
// cluster.
PartSelection select_part(const SemanticCatalog& catalog, const std::string& spec);

// Elementwise sum of the member rows at a layer, clamped to [0, 1].
std::vector<double> part_row(const SemanticCatalog& catalog, int layer, const PartSelection& part);

// Disjoint cluster groups that compete for each pixel of an ROI mask: every
// part, then every unassigned cluster, ordered by smallest member id.
std::vector<std::vector<int>> roi_groups(const SemanticCatalog& catalog);

// Writes <dir>/manifest.json and <dir>/arrays.npz.
void save_catalog(const SemanticCatalog& catalog, const std::filesystem::path& dir);
SemanticCatalog load_catalog(const std::filesystem::path& dir);

}  // namespace ganlocal
