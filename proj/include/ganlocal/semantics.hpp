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

// Spherical k-means over patch embeddings and per-layer channel
// attribution. Activations A (N x C x H x W) are viewed as a bag of
// N*H*W C-dimensional rows; clustering them with cosine similarity is the
// factorization A ~ U V with one-hot U and unit-norm centroid rows V.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ganlocal/ndio.hpp"

namespace ganlocal::semantics {

struct CentroidMatrix {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<float> v;  // k x dim, unit rows

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(v).subspan(i * dim, dim);
  }
  bool operator==(const CentroidMatrix&) const = default;
};

struct KMeansOptions {
  std::size_t k = 15;
  std::uint64_t seed = 0;
  int max_iter = 100;
  double tol = 1e-5;
};

struct KMeansResult {
  std::vector<int> labels;        // one per row
  CentroidMatrix centroids;
  std::vector<double> objective;  // after each assignment step, nondecreasing
  int iterations = 0;
};

// Row-major (N*H*W) x C view of a tensor; row index ((n*H)+h)*W+w.
std::vector<float> flatten_rows(const Tensor4& t);

// Scales each row to unit length in place; zero rows stay zero.
void normalize_rows(std::span<float> rows, std::size_t dim);

// Clusters unit-normalized rows. Throws DegenerateInput when k exceeds the
// number of distinct non-zero rows.
KMeansResult spherical_kmeans_rows(std::span<const float> unit_rows, std::size_t dim,
                                   const KMeansOptions& options);

struct SphericalKMeans {
  MembershipTensor membership;  // hard, (N, K, H, W)
  CentroidMatrix centroids;
  std::vector<double> objective;
  int iterations = 0;
};

SphericalKMeans spherical_kmeans(const ActivationTensor& a, const KMeansOptions& options);

// Sum over rows of <row, centroid[label]>.
double kmeans_objective(std::span<const float> rows, std::size_t dim, std::span<const int> labels,
                        const CentroidMatrix& centroids);

// Hard membership of new activations against fixed centroids, after
// standardizing with the given moments.
MembershipTensor assign_membership(const ActivationTensor& raw, const ChannelMoments& moments,
                                   const CentroidMatrix& centroids);

struct AttributionMatrix {
  std::size_t k = 0;
  std::size_t c = 0;
  int layer_id = -1;
  std::vector<float> m;  // k x c, accumulated in double

  float at(std::size_t kk, std::size_t cc) const { return m[kk * c + cc]; }
  std::span<const float> row(std::size_t kk) const {
    return std::span<const float>(m).subspan(kk * c, c);
  }
  bool operator==(const AttributionMatrix&) const = default;
};

// M[k][c] = 1/(N H W) * sum_{n,h,w} A[n,c,h,w]^2 U[n,k,h,w].
AttributionMatrix channel_attribution(const ActivationTensor& a, const MembershipTensor& u);

// Resamples u_base to each layer, standardizes the capture and evaluates
// channel_attribution.
std::map<int, AttributionMatrix> attribution_all_layers(
    const std::map<int, ActivationTensor>& captures, const MembershipTensor& u_base);

}  // namespace ganlocal::semantics
