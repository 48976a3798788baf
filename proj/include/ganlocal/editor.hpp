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

// Local editing by conditioned style interpolation:
//   sigma_G = sigma_S + diag(q) (sigma_R - sigma_S)
// where the query q is built per layer from the attribution row of the
// chosen part. Two query builders are provided: "simultaneous", which
// scales every channel by its attribution, and "sequential", which fills
// channels in decreasing attribution order under a budget on the effect
// outside the region of interest.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ganlocal/catalog.hpp"
#include "ganlocal/minigen.hpp"

namespace ganlocal::editor {

inline constexpr double kDefaultRhoRatio = 0.1;
inline constexpr double kDefaultEpsilon = 40.0;

struct QueryVector {
  int layer_id = -1;
  std::vector<double> q;  // each in [0, 1]
};

enum class EditMode { kGlobal, kSimultaneous, kSequential };

std::string to_string(EditMode mode);
EditMode parse_mode(const std::string& text);

struct EditParams {
  EditMode mode = EditMode::kSequential;
  double lambda = 1.0;                  // global and simultaneous
  double epsilon = kDefaultEpsilon;     // sequential
  double rho_ratio = kDefaultRhoRatio;  // rho / (1 + rho), sequential
};

// Throws InvalidArgument when a field is out of range for the mode.
void validate(const EditParams& params);

std::vector<float> interpolate_global(std::span<const float> sigma_s, std::span<const float> sigma_r,
                                      double lambda);

// q_c = min(1, lambda * m_c)
QueryVector query_simultaneous(std::span<const double> m_row, double lambda);

// Greedy fractional fill: channels with m_c > rho_ratio, in decreasing m_c
// (ties by index), get q_c = 1 while sum q_c (1 - m_c) stays within epsilon;
// the first channel that does not fit takes the remaining budget
// fractionally and the rest get 0.
QueryVector query_sequential(std::span<const double> m_row, double epsilon, double rho_ratio);

std::vector<float> interpolate_conditioned(std::span<const float> sigma_s, std::span<const float> sigma_r,
                                           std::span<const double> q);

// sum_c q_c (1 - m_c)
double budget_used(std::span<const double> q, std::span<const double> m_row);

using EditSource = std::variant<std::uint64_t, minigen::StyleSet>;

struct EditRequest {
  EditSource target = std::uint64_t{0};
  EditSource reference = std::uint64_t{1};
  PartSelection part;
  EditParams params;
  std::optional<std::set<int>> layers;  // default: every styled layer
};

struct EditResult {
  minigen::RenderResult edited;
  minigen::RenderResult target;
  minigen::RenderResult reference;
  minigen::StyleSet target_styles;
  minigen::StyleSet reference_styles;
  minigen::StyleSet edited_styles;
  std::map<int, QueryVector> q;
};

minigen::StyleSet resolve_styles(const EditSource& source, const minigen::Generator& generator);

// Per-layer queries for the part; layers outside the filter are absent.
std::map<int, QueryVector> build_queries(const SemanticCatalog& catalog, const PartSelection& part,
                                         const EditParams& params, std::size_t layer_count,
                                         const std::optional<std::set<int>>& layers);

minigen::StyleSet apply_queries(const minigen::StyleSet& target, const minigen::StyleSet& reference,
                                const std::map<int, QueryVector>& q);

// Renders target, reference and edit. capture_layers is forwarded to all
// three renders.
EditResult edit(const EditRequest& request, const SemanticCatalog& catalog,
                const minigen::Generator& generator, const std::set<int>& capture_layers = {});

}  // namespace ganlocal::editor
