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

// End-to-end flows built from the modules: render a sample batch, cluster
// it into a catalog, attribute every layer, and run edits with locality
// metrics. Shared by the CLI, the HTTP service and the acceptance suite.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ganlocal/catalog.hpp"
#include "ganlocal/editor.hpp"
#include "ganlocal/metrics.hpp"
#include "ganlocal/minigen.hpp"

namespace ganlocal::pipeline {

struct SampleBatch {
  std::vector<std::uint64_t> seeds;
  std::vector<Image> images;
  std::vector<minigen::StyleSet> styles;
  std::map<int, ActivationTensor> captures;  // batched, N = seeds.size()
};

SampleBatch render_batch(const minigen::Generator& generator, std::uint64_t first_seed, std::size_t count,
                         const std::set<int>& capture_layers);

struct CatalogOptions {
  std::size_t k = 15;
  std::uint64_t kmeans_seed = 0;
  std::size_t sample_count = kDefaultSampleCount;
  std::uint64_t first_sample_seed = 0;
  std::optional<int> base_layer;  // generator default when absent
  bool attribute_all_layers = true;
  int max_iter = 100;
  double tol = 1e-5;
};

struct ClusterOutcome {
  SemanticCatalog catalog;
  std::vector<double> objective;
  int iterations = 0;
};

// Clusters the base-layer capture and attributes every capture in the map.
ClusterOutcome catalog_from_captures(const std::map<int, ActivationTensor>& captures, int base_layer,
                                     const semantics::KMeansOptions& kmeans, const Provenance& provenance);

ClusterOutcome build_catalog(const minigen::Generator& generator, const CatalogOptions& options);

// Recomputes per-layer attribution from captures using the catalog's base
// memberships.
SemanticCatalog attribute_catalog(const SemanticCatalog& catalog, const std::map<int, ActivationTensor>& captures);

// Re-renders the catalog's sample batch and attributes every styled layer.
SemanticCatalog attribute_catalog(const SemanticCatalog& catalog, const minigen::Generator& generator);

// Hard base-layer membership of one rendered image against the catalog.
MembershipTensor membership_for(const SemanticCatalog& catalog, const minigen::RenderResult& render);

metrics::RoiMask mask_for(const SemanticCatalog& catalog, const MembershipTensor& membership,
                          const PartSelection& part, std::size_t h, std::size_t w);

struct QSummary {
  int layer = -1;
  std::size_t support = 0;  // channels with q > 0
  double sum_q = 0.0;
  double budget_used = 0.0;  // sum q (1 - m)
};

std::vector<QSummary> summarize_queries(const SemanticCatalog& catalog, const PartSelection& part,
                                        const std::map<int, editor::QueryVector>& q);

struct EditReport {
  editor::EditResult result;
  metrics::RoiMask mask;
  metrics::LocalityReport locality;
  metrics::DiffMap diff;
  std::vector<QSummary> q_summary;
};

EditReport run_edit(const minigen::Generator& generator, const SemanticCatalog& catalog,
                    const editor::EditRequest& request);

// Target/reference pair with the target's ROI precomputed, so that
// parameter sweeps only render the edited image.
struct PreparedPair {
  std::size_t pair_id = 0;
  std::uint64_t target_seed = 0;
  std::uint64_t reference_seed = 0;
  PartSelection part;
  minigen::StyleSet target;
  minigen::StyleSet reference;
  Image target_image;
  metrics::RoiMask mask;
};

PreparedPair prepare_pair(const minigen::Generator& generator, const SemanticCatalog& catalog, std::size_t pair_id,
                          std::uint64_t target_seed, std::uint64_t reference_seed, const PartSelection& part);

// Like prepare_pair, but picks the part: starting at pair_id modulo the
// candidate count, the first candidate whose ROI in the target is neither
// empty nor the whole image. Returns nullopt when none qualifies.
std::optional<PreparedPair> prepare_pair_auto(const minigen::Generator& generator, const SemanticCatalog& catalog,
                                              std::size_t pair_id, std::uint64_t target_seed,
                                              std::uint64_t reference_seed,
                                              const std::vector<PartSelection>& candidates);

// Every explicit part, or every unassigned cluster as "cluster:<k>" when
// the catalog has no parts.
std::vector<PartSelection> default_parts(const SemanticCatalog& catalog);

struct PairEvaluation {
  metrics::LocalityReport locality;
  std::vector<QSummary> q_summary;
};

PairEvaluation evaluate_pair(const minigen::Generator& generator, const SemanticCatalog& catalog,
                             const PreparedPair& pair, const editor::EditParams& params);

}  // namespace ganlocal::pipeline
