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

// Hot loops of the pipeline. Each kernel exists twice with the same
// signature: kernels::parallel (OpenMP, used by the library) and
// kernels::serial (plain loops, kept as the reference for tests and the
// benchmark). Parallel reductions accumulate in fixed-size chunks combined
// in chunk order, so results do not depend on the thread count.

#include <cstddef>
#include <span>

namespace ganlocal::kernels {

// Rows per reduction chunk in the parallel kernels.
inline constexpr std::size_t kChunkRows = 4096;

struct ConvShape {
  std::size_t cin = 0;
  std::size_t cout = 0;
  std::size_t h = 0;
  std::size_t w = 0;
};

#define GANLOCAL_KERNEL_DECLS                                                          \
  /* 3x3 convolution, stride 1, reflect padding. in: cin*h*w, weight:                 \
     cout*cin*9, bias: cout, out: cout*h*w. */                                         \
  void conv3x3_reflect(const ConvShape& s, std::span<const float> in,                  \
                       std::span<const float> weight, std::span<const float> bias,    \
                       std::span<float> out);                                          \
  /* labels[i] = argmax_k <row_i, centroid_k>, ties to the lowest k; best[i] is      \
     the winning dot product. Zero rows go to cluster 0 with similarity 0. */          \
  void assign_rows(std::span<const float> rows, std::size_t dim,                       \
                   std::span<const float> centroids, std::size_t k,                    \
                   std::span<int> labels, std::span<double> best);                     \
  /* sums (k*dim) and counts (k) of rows per label. */                                 \
  void accumulate_clusters(std::span<const float> rows, std::size_t dim,               \
                           std::span<const int> labels, std::size_t k,                 \
                           std::span<double> sums, std::span<std::size_t> counts);     \
  double sum(std::span<const double> values);                                          \
  /* m[k*c_count + c] = sum_{n,h,w} a[n,c,h,w]^2 * u[n,k,h,w] (unnormalized). */      \
  void attribution_sums(std::span<const float> a, std::span<const float> u,            \
                        std::size_t n, std::size_t c_count, std::size_t k,             \
                        std::size_t plane, std::span<double> m);

namespace serial {
GANLOCAL_KERNEL_DECLS
}  // namespace serial

namespace parallel {
GANLOCAL_KERNEL_DECLS
}  // namespace parallel

#undef GANLOCAL_KERNEL_DECLS

}  // namespace ganlocal::kernels
