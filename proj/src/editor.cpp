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

#include "ganlocal/editor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ganlocal/error.hpp"

namespace ganlocal::editor {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": lengths " + std::to_string(a) + " and " +
                                               std::to_string(b) + " differ");
  }
}

}  // namespace

std::string to_string(EditMode mode) {
  switch (mode) {
    case EditMode::kGlobal: return "global";
    case EditMode::kSimultaneous: return "simultaneous";
    case EditMode::kSequential: return "sequential";
  }
  return "unknown";
}

EditMode parse_mode(const std::string& text) {
  if (text == "global") return EditMode::kGlobal;
  if (text == "simultaneous") return EditMode::kSimultaneous;
  if (text == "sequential") return EditMode::kSequential;
  throw Error(ErrorCode::kInvalidArgument, "unknown edit mode '" + text + "'");
}

void validate(const EditParams& p) {
  switch (p.mode) {
    case EditMode::kGlobal:
      if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be in [0, 1]");
      break;
    case EditMode::kSimultaneous:
      if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
      break;
    case EditMode::kSequential:
      if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
      if (!(p.rho_ratio >= 0.0 && p.rho_ratio < 1.0)) throw Error(ErrorCode::kInvalidArgument, "rho_ratio must be in [0, 1)");
      break;
  }
}

std::vector<float> interpolate_global(std::span<const float> sigma_s, std::span<const float> sigma_r,
                                      double lambda) {
  std::vector<double> q(sigma_s.size(), lambda);
  return interpolate_conditioned(sigma_s, sigma_r, q);
}

QueryVector query_simultaneous(std::span<const double> m_row, double lambda) {
  QueryVector out;
  out.q.resize(m_row.size());
  for (std::size_t c = 0; c < m_row.size(); ++c) out.q[c] = std::min(1.0, lambda * m_row[c]);
  return out;
}

QueryVector query_sequential(std::span<const double> m_row, double epsilon, double rho_ratio) {
  QueryVector out;
  out.q.assign(m_row.size(), 0.0);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < m_row.size(); ++c) {
    if (m_row[c] > rho_ratio) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m_row[a] > m_row[b]; });
  double cost = 0.0;
  for (std::size_t c : order) {
    const double weight = 1.0 - m_row[c];
    if (weight <= 0.0) {
      out.q[c] = 1.0;
      continue;
    }
    if (cost + weight <= epsilon) {
      out.q[c] = 1.0;
      cost += weight;
      continue;
    }
    out.q[c] = std::max(0.0, (epsilon - cost) / weight);
    break;
  }
  return out;
}

std::vector<float> interpolate_conditioned(std::span<const float> sigma_s, std::span<const float> sigma_r,
                                           std::span<const double> q) {
  require_same_length(sigma_s.size(), sigma_r.size(), "interpolate");
  require_same_length(sigma_s.size(), q.size(), "interpolate (query)");
  std::vector<float> out(sigma_s.size());
  // std::lerp is exact at both ends: q = 0 gives sigma_s and q = 1 gives
  // sigma_r bit for bit.
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = static_cast<float>(std::lerp(static_cast<double>(sigma_s[c]), static_cast<double>(sigma_r[c]), q[c]));
  }
  return out;
}

double budget_used(std::span<const double> q, std::span<const double> m_row) {
  require_same_length(q.size(), m_row.size(), "budget_used");
  double total = 0.0;
  for (std::size_t c = 0; c < q.size(); ++c) total += q[c] * (1.0 - m_row[c]);
  return total;
}

minigen::StyleSet resolve_styles(const EditSource& source, const minigen::Generator& generator) {
  if (const auto* seed = std::get_if<std::uint64_t>(&source)) return generator.styles_for_seed(*seed);
  return std::get<minigen::StyleSet>(source);
}

std::map<int, QueryVector> build_queries(const SemanticCatalog& catalog, const PartSelection& part,
                                         const EditParams& params, std::size_t layer_count,
                                         const std::optional<std::set<int>>& layers) {
  validate(params);
  if (part.members.empty()) throw Error(ErrorCode::kUnknownPart, "part has no clusters");
  for (int id : part.members) {
    if (id < 0 || static_cast<std::size_t>(id) >= catalog.k) {
      throw Error(ErrorCode::kUnknownPart, "part references cluster " + std::to_string(id));
    }
  }
  std::map<int, QueryVector> out;
  for (std::size_t l = 0; l < layer_count; ++l) {
    const int layer = static_cast<int>(l);
    if (layers && layers->count(layer) == 0) continue;
    const auto row = part_row(catalog, layer, part);
    QueryVector q;
    switch (params.mode) {
      case EditMode::kGlobal: q.q.assign(row.size(), params.lambda); break;
      case EditMode::kSimultaneous: q = query_simultaneous(row, params.lambda); break;
      case EditMode::kSequential: q = query_sequential(row, params.epsilon, params.rho_ratio); break;
    }
    q.layer_id = layer;
    out.emplace(layer, std::move(q));
  }
  return out;
}

minigen::StyleSet apply_queries(const minigen::StyleSet& target, const minigen::StyleSet& reference,
                                const std::map<int, QueryVector>& q) {
  require_same_length(target.sigma.size(), reference.sigma.size(), "style sets");
  minigen::StyleSet out = target;
  for (const auto& [layer, query] : q) {
    const auto l = static_cast<std::size_t>(layer);
    if (l >= out.sigma.size()) throw Error(ErrorCode::kShapeMismatch, "query for unknown layer");
    out.sigma[l] = interpolate_conditioned(target.sigma[l], reference.sigma[l], query.q);
  }
  return out;
}

EditResult edit(const EditRequest& request, const SemanticCatalog& catalog, const minigen::Generator& generator,
                const std::set<int>& capture_layers) {
  EditResult out;
  out.target_styles = resolve_styles(request.target, generator);
  out.reference_styles = resolve_styles(request.reference, generator);
  out.q = build_queries(catalog, request.part, request.params, generator.config().layers(), request.layers);
  out.edited_styles = apply_queries(out.target_styles, out.reference_styles, out.q);
  out.target = generator.synthesize(out.target_styles, capture_layers);
  out.reference = generator.synthesize(out.reference_styles, capture_layers);
  out.edited = generator.synthesize(out.edited_styles, capture_layers);
  return out;
}

}  // namespace ganlocal::editor
