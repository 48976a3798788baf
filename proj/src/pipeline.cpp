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

#include "ganlocal/pipeline.hpp"

#include "ganlocal/error.hpp"

namespace ganlocal::pipeline {

SampleBatch render_batch(const minigen::Generator& generator, std::uint64_t first_seed, std::size_t count,
                         const std::set<int>& capture_layers) {
  SampleBatch batch;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = first_seed + i;
    auto styles = generator.styles_for_seed(seed);
    auto render = generator.synthesize(styles, capture_layers);
    for (auto& [layer, cap] : render.captures) {
      const auto& s = cap.tensor.shape();
      auto [it, fresh] = batch.captures.try_emplace(layer);
      if (fresh) {
        it->second.layer_id = layer;
        it->second.tensor = Tensor4(Shape4{count, s.c, s.h, s.w});
      }
      std::copy(cap.tensor.data().begin(), cap.tensor.data().end(),
                it->second.tensor.data().begin() + static_cast<std::ptrdiff_t>(i * s.c * s.plane()));
    }
    batch.seeds.push_back(seed);
    batch.images.push_back(std::move(render.image));
    batch.styles.push_back(std::move(styles));
  }
  return batch;
}

ClusterOutcome catalog_from_captures(const std::map<int, ActivationTensor>& captures, int base_layer,
                                     const semantics::KMeansOptions& kmeans, const Provenance& provenance) {
  auto it = captures.find(base_layer);
  if (it == captures.end()) {
    throw Error(ErrorCode::kMissingLayerAttribution, "no capture for base layer " + std::to_string(base_layer));
  }
  const auto moments = channel_moments(it->second.tensor);
  const auto standardized = standardize_with(it->second, moments);
  auto km = semantics::spherical_kmeans(standardized, kmeans);
  ClusterOutcome out;
  out.catalog = make_catalog(base_layer, std::move(km.centroids), km.membership, moments, provenance);
  out.catalog = attribute_catalog(out.catalog, captures);
  out.objective = std::move(km.objective);
  out.iterations = km.iterations;
  return out;
}

ClusterOutcome build_catalog(const minigen::Generator& generator, const CatalogOptions& options) {
  if (options.sample_count < options.k) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be at least K");
  }
  const int base = options.base_layer.value_or(generator.config().base_layer);
  const auto layers = options.attribute_all_layers ? minigen::all_layers(generator.config()) : std::set<int>{base};
  const auto batch = render_batch(generator, options.first_sample_seed, options.sample_count, layers);
  Provenance prov{options.kmeans_seed, options.sample_count, generator.config().seed, options.first_sample_seed};
  return catalog_from_captures(batch.captures, base,
                               semantics::KMeansOptions{options.k, options.kmeans_seed, options.max_iter, options.tol},
                               prov);
}

SemanticCatalog attribute_catalog(const SemanticCatalog& catalog, const std::map<int, ActivationTensor>& captures) {
  return with_attributions(catalog, semantics::attribution_all_layers(captures, catalog.base_membership()));
}

SemanticCatalog attribute_catalog(const SemanticCatalog& catalog, const minigen::Generator& generator) {
  const auto batch = render_batch(generator, catalog.provenance.first_sample_seed, catalog.provenance.sample_count,
                                  minigen::all_layers(generator.config()));
  const auto& base = batch.captures.at(catalog.base_layer_id).tensor.shape();
  if (base.h != catalog.base_h || base.w != catalog.base_w || base.n * base.plane() != catalog.base_labels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "catalog batch does not match the generator's base layer");
  }
  return attribute_catalog(catalog, batch.captures);
}

MembershipTensor membership_for(const SemanticCatalog& catalog, const minigen::RenderResult& render) {
  auto it = render.captures.find(catalog.base_layer_id);
  if (it == render.captures.end()) {
    throw Error(ErrorCode::kMissingLayerAttribution, "render lacks the base-layer capture");
  }
  return semantics::assign_membership(it->second, catalog.base_moments, catalog.centroids);
}

metrics::RoiMask mask_for(const SemanticCatalog& catalog, const MembershipTensor& membership,
                          const PartSelection& part, std::size_t h, std::size_t w) {
  auto mask = metrics::roi_mask(membership, roi_groups(catalog), part.members, h, w);
  mask.part = part.name;
  return mask;
}

std::vector<QSummary> summarize_queries(const SemanticCatalog& catalog, const PartSelection& part,
                                        const std::map<int, editor::QueryVector>& q) {
  std::vector<QSummary> out;
  for (const auto& [layer, query] : q) {
    const auto row = part_row(catalog, layer, part);
    QSummary s;
    s.layer = layer;
    for (double v : query.q) {
      if (v > 0.0) ++s.support;
      s.sum_q += v;
    }
    s.budget_used = editor::budget_used(query.q, row);
    out.push_back(s);
  }
  return out;
}

EditReport run_edit(const minigen::Generator& generator, const SemanticCatalog& catalog,
                    const editor::EditRequest& request) {
  EditReport report;
  report.result = editor::edit(request, catalog, generator, {catalog.base_layer_id});
  const auto& target = report.result.target.image;
  const auto membership = membership_for(catalog, report.result.target);
  report.mask = mask_for(catalog, membership, request.part, target.h, target.w);
  report.locality = metrics::locality(target, report.result.edited.image, report.mask);
  report.diff = metrics::diff_map(target, report.result.edited.image);
  report.q_summary = summarize_queries(catalog, request.part, report.result.q);
  return report;
}

PreparedPair prepare_pair(const minigen::Generator& generator, const SemanticCatalog& catalog, std::size_t pair_id,
                          std::uint64_t target_seed, std::uint64_t reference_seed, const PartSelection& part) {
  PreparedPair pair;
  pair.pair_id = pair_id;
  pair.target_seed = target_seed;
  pair.reference_seed = reference_seed;
  pair.part = part;
  pair.target = generator.styles_for_seed(target_seed);
  pair.reference = generator.styles_for_seed(reference_seed);
  const auto render = generator.synthesize(pair.target, {catalog.base_layer_id});
  pair.mask = mask_for(catalog, membership_for(catalog, render), part, render.image.h, render.image.w);
  pair.target_image = render.image;
  return pair;
}

std::optional<PreparedPair> prepare_pair_auto(const minigen::Generator& generator, const SemanticCatalog& catalog,
                                              std::size_t pair_id, std::uint64_t target_seed,
                                              std::uint64_t reference_seed,
                                              const std::vector<PartSelection>& candidates) {
  if (candidates.empty()) return std::nullopt;
  PreparedPair pair = prepare_pair(generator, catalog, pair_id, target_seed, reference_seed, candidates.front());
  const auto render = generator.synthesize(pair.target, {catalog.base_layer_id});
  const auto membership = membership_for(catalog, render);
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const auto& part = candidates[(pair_id + j) % candidates.size()];
    auto mask = mask_for(catalog, membership, part, render.image.h, render.image.w);
    const std::size_t area = mask.area();
    if (area > 0 && area < mask.inside.size()) {
      pair.part = part;
      pair.mask = std::move(mask);
      return pair;
    }
  }
  return std::nullopt;
}

std::vector<PartSelection> default_parts(const SemanticCatalog& catalog) {
  std::vector<PartSelection> out;
  for (const auto& p : catalog.parts) out.push_back(select_part(catalog, p.part_id));
  if (out.empty()) {
    for (const auto& c : catalog.clusters) {
      if (!c.merged_into) out.push_back(select_part(catalog, "cluster:" + std::to_string(c.id)));
    }
  }
  return out;
}

PairEvaluation evaluate_pair(const minigen::Generator& generator, const SemanticCatalog& catalog,
                             const PreparedPair& pair, const editor::EditParams& params) {
  const auto q = editor::build_queries(catalog, pair.part, params, generator.config().layers(), std::nullopt);
  const auto edited = generator.synthesize(editor::apply_queries(pair.target, pair.reference, q));
  PairEvaluation out;
  out.locality = metrics::locality(pair.target_image, edited.image, pair.mask);
  out.q_summary = summarize_queries(catalog, pair.part, q);
  return out;
}

}  // namespace ganlocal::pipeline
