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

#include "ganlocal/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ganlocal/error.hpp"
#include "ganlocal/kernels.hpp"
#include "ganlocal/rng.hpp"

namespace ganlocal::semantics {
namespace {

namespace kp = kernels::parallel;

bool is_zero(std::span<const float> r) {
  return std::all_of(r.begin(), r.end(), [](float v) { return v == 0.0f; });
}

// True once `want` pairwise-distinct non-zero rows have been seen.
bool has_distinct_rows(std::span<const float> rows, std::size_t dim, std::size_t want) {
  std::vector<std::size_t> seen;
  const std::size_t n = rows.size() / dim;
  for (std::size_t i = 0; i < n && seen.size() < want; ++i) {
    auto r = rows.subspan(i * dim, dim);
    if (is_zero(r)) continue;
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](std::size_t j) {
      return std::equal(r.begin(), r.end(), rows.begin() + static_cast<std::ptrdiff_t>(j * dim));
    });
    if (!dup) seen.push_back(i);
  }
  return seen.size() >= want;
}

// k-means++ seeding with cosine distance 1 - <x, c>.
std::vector<float> seed_centroids(std::span<const float> rows, std::size_t dim, std::size_t k,
                                  std::uint64_t seed) {
  const std::size_t n = rows.size() / dim;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_zero(rows.subspan(i * dim, dim))) candidates.push_back(i);
  }
  NormalStream rng(seed);
  std::vector<float> centroids;
  centroids.reserve(k * dim);
  auto take = [&](std::size_t i) {
    centroids.insert(centroids.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * dim),
                     rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  };
  const auto first = std::min(candidates.size() - 1,
                              static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size())));
  take(candidates[first]);

  std::vector<double> nearest(n, 0.0);
  std::vector<int> scratch_labels(n);
  std::vector<double> sim(n);
  auto refresh = [&](std::span<const float> c, bool init) {
    kp::assign_rows(rows, dim, c, 1, scratch_labels, sim);
    for (std::size_t i : candidates) {
      const double d = std::max(0.0, 1.0 - sim[i]);
      nearest[i] = init ? d : std::min(nearest[i], d);
    }
  };
  refresh(std::span<const float>(centroids).subspan(0, dim), true);

  for (std::size_t j = 1; j < k; ++j) {
    double total = 0.0;
    for (std::size_t i : candidates) total += nearest[i] * nearest[i];
    std::size_t pick = candidates.back();
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i : candidates) {
        acc += nearest[i] * nearest[i];
        if (acc > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave target == total; fall back to the last positive row.
      if (!(nearest[pick] > 0.0)) {
        for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
          if (nearest[*it] > 0.0) {
            pick = *it;
            break;
          }
        }
      }
    }
    take(pick);
    refresh(std::span<const float>(centroids).subspan(j * dim, dim), false);
  }
  return centroids;
}

// Normalized cluster sums; clusters that end up empty (or with a zero sum)
// are re-seeded from the rows with the lowest current similarity.
std::vector<float> update_centroids(std::span<const float> rows, std::size_t dim, std::size_t k,
                                    std::span<const int> labels, std::span<const double> best) {
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  kp::accumulate_clusters(rows, dim, labels, k, sums, counts);
  std::vector<float> out(k * dim, 0.0f);
  std::vector<std::size_t> empty;
  for (std::size_t j = 0; j < k; ++j) {
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += sums[j * dim + d] * sums[j * dim + d];
    norm = std::sqrt(norm);
    if (counts[j] == 0 || norm == 0.0) {
      empty.push_back(j);
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) out[j * dim + d] = static_cast<float>(sums[j * dim + d] / norm);
  }
  if (!empty.empty()) {
    const std::size_t n = labels.size();
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_zero(rows.subspan(i * dim, dim))) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best[a] < best[b]; });
    std::size_t next = 0;
    for (std::size_t j : empty) {
      if (next >= order.size()) break;
      const std::size_t i = order[next++];
      std::copy_n(rows.begin() + static_cast<std::ptrdiff_t>(i * dim), dim,
                  out.begin() + static_cast<std::ptrdiff_t>(j * dim));
    }
  }
  return out;
}

}  // namespace

std::vector<float> flatten_rows(const Tensor4& t) {
  const auto& s = t.shape();
  std::vector<float> rows(s.size());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      auto p = t.plane(n, c);
      for (std::size_t q = 0; q < s.plane(); ++q) rows[(n * s.plane() + q) * s.c + c] = p[q];
    }
  }
  return rows;
}

void normalize_rows(std::span<float> rows, std::size_t dim) {
  const std::size_t n = rows.size() / dim;
  for (std::size_t i = 0; i < n; ++i) {
    float* r = rows.data() + i * dim;
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) sq += static_cast<double>(r[d]) * r[d];
    if (sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t d = 0; d < dim; ++d) r[d] = static_cast<float>(r[d] * inv);
  }
}

KMeansResult spherical_kmeans_rows(std::span<const float> rows, std::size_t dim,
                                   const KMeansOptions& options) {
  if (options.k == 0) throw Error(ErrorCode::kInvalidArgument, "spherical_kmeans: k must be >= 1");
  if (dim == 0 || rows.size() % dim != 0) throw Error(ErrorCode::kShapeMismatch, "spherical_kmeans: row layout");
  if (!has_distinct_rows(rows, dim, options.k)) {
    throw Error(ErrorCode::kDegenerateInput,
                "spherical_kmeans: k = " + std::to_string(options.k) + " exceeds the number of distinct rows");
  }
  const std::size_t n = rows.size() / dim;
  const std::size_t k = options.k;

  KMeansResult result;
  result.centroids = CentroidMatrix{k, dim, seed_centroids(rows, dim, k, options.seed)};
  result.labels.assign(n, 0);
  std::vector<double> best(n);
  kp::assign_rows(rows, dim, result.centroids.v, k, result.labels, best);
  double objective = kp::sum(best);
  result.objective.push_back(objective);

  std::vector<int> next_labels(n);
  std::vector<double> next_best(n);
  for (int it = 1; it <= options.max_iter; ++it) {
    auto next_v = update_centroids(rows, dim, k, result.labels, best);
    kp::assign_rows(rows, dim, next_v, k, next_labels, next_best);
    const double next_objective = kp::sum(next_best);
    // A decrease can only come from float rounding at convergence; keep
    // the previous (labels, centroids) pair, which is self-consistent.
    if (next_objective < objective) break;
    const double improvement = next_objective - objective;
    result.centroids.v = std::move(next_v);
    result.labels.swap(next_labels);
    best.swap(next_best);
    objective = next_objective;
    result.objective.push_back(objective);
    result.iterations = it;
    if (improvement < options.tol) break;
  }
  return result;
}

SphericalKMeans spherical_kmeans(const ActivationTensor& a, const KMeansOptions& options) {
  if (!a.standardized) throw Error(ErrorCode::kInvalidArgument, "spherical_kmeans: activations must be standardized");
  const auto& s = a.tensor.shape();
  auto rows = flatten_rows(a.tensor);
  normalize_rows(rows, s.c);
  auto km = spherical_kmeans_rows(rows, s.c, options);
  SphericalKMeans out;
  out.membership = one_hot(km.labels, s.n, options.k, s.h, s.w);
  out.centroids = std::move(km.centroids);
  out.objective = std::move(km.objective);
  out.iterations = km.iterations;
  return out;
}

double kmeans_objective(std::span<const float> rows, std::size_t dim, std::span<const int> labels,
                        const CentroidMatrix& centroids) {
  if (centroids.dim != dim || rows.size() != labels.size() * dim) {
    throw Error(ErrorCode::kShapeMismatch, "kmeans_objective: shapes disagree");
  }
  std::vector<double> dots(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = centroids.row(static_cast<std::size_t>(labels[i]));
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) d += static_cast<double>(rows[i * dim + j]) * c[j];
    dots[i] = d;
  }
  return kp::sum(dots);
}

MembershipTensor assign_membership(const ActivationTensor& raw, const ChannelMoments& moments,
                                   const CentroidMatrix& centroids) {
  const auto st = standardize_with(raw, moments);
  const auto& s = st.tensor.shape();
  if (centroids.dim != s.c) throw Error(ErrorCode::kShapeMismatch, "assign_membership: centroid width");
  auto rows = flatten_rows(st.tensor);
  normalize_rows(rows, s.c);
  std::vector<int> labels(s.n * s.plane());
  std::vector<double> best(labels.size());
  kp::assign_rows(rows, s.c, centroids.v, centroids.k, labels, best);
  return one_hot(labels, s.n, centroids.k, s.h, s.w);
}

AttributionMatrix channel_attribution(const ActivationTensor& a, const MembershipTensor& u) {
  const auto& sa = a.tensor.shape();
  const auto& su = u.tensor.shape();
  if (sa.n != su.n || sa.h != su.h || sa.w != su.w) {
    throw Error(ErrorCode::kShapeMismatch, "channel_attribution: activation " + to_string(sa) +
                                               " vs membership " + to_string(su));
  }
  if (!a.standardized) throw Error(ErrorCode::kInvalidArgument, "channel_attribution: activations must be standardized");
  AttributionMatrix out;
  out.k = su.c;
  out.c = sa.c;
  out.layer_id = a.layer_id;
  std::vector<double> sums(out.k * out.c, 0.0);
  kp::attribution_sums(a.tensor.data(), u.tensor.data(), sa.n, sa.c, su.c, sa.plane(), sums);
  const double scale = 1.0 / static_cast<double>(sa.n * sa.plane());
  out.m.resize(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) out.m[i] = static_cast<float>(sums[i] * scale);
  return out;
}

std::map<int, AttributionMatrix> attribution_all_layers(
    const std::map<int, ActivationTensor>& captures, const MembershipTensor& u_base) {
  std::map<int, AttributionMatrix> out;
  for (const auto& [layer, capture] : captures) {
    const auto& s = capture.tensor.shape();
    const auto& su = u_base.tensor.shape();
    const bool same = s.h == su.h && s.w == su.w;
    const MembershipTensor resized = same ? u_base : resample_membership(u_base, s.h, s.w);
    const ActivationTensor st = capture.standardized ? capture : standardize(capture);
    auto m = channel_attribution(st, resized);
    m.layer_id = layer;
    out.emplace(layer, std::move(m));
  }
  return out;
}

}  // namespace ganlocal::semantics
