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

#include <algorithm>
#include <cstdlib>

#include "ganlocal/kernels.hpp"
#include "kernels_common.hpp"

namespace ganlocal::kernels::serial {
namespace {

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  if (i < 0) return static_cast<std::size_t>(-i);
  if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * n - 2 - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

}  // namespace

void conv3x3_reflect(const ConvShape& s, std::span<const float> in, std::span<const float> weight,
                     std::span<const float> bias, std::span<float> out) {
  for (std::size_t co = 0; co < s.cout; ++co) {
    for (std::size_t y = 0; y < s.h; ++y) {
      for (std::size_t x = 0; x < s.w; ++x) {
        float acc = bias[co];
        for (std::size_t ci = 0; ci < s.cin; ++ci) {
          for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
            const std::size_t sy = reflect(static_cast<std::ptrdiff_t>(y) + ky - 1, s.h);
            for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
              const std::size_t sx = reflect(static_cast<std::ptrdiff_t>(x) + kx - 1, s.w);
              acc += weight[((co * s.cin + ci) * 3 + static_cast<std::size_t>(ky)) * 3 +
                            static_cast<std::size_t>(kx)] *
                     in[(ci * s.h + sy) * s.w + sx];
            }
          }
        }
        out[(co * s.h + y) * s.w + x] = acc;
      }
    }
  }
}

void assign_rows(std::span<const float> rows, std::size_t dim, std::span<const float> centroids,
                 std::size_t k, std::span<int> labels, std::span<double> best) {
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const float* r = rows.data() + i * dim;
    bool zero = true;
    for (std::size_t d = 0; d < dim; ++d) zero = zero && r[d] == 0.0f;
    if (zero) {
      labels[i] = 0;
      best[i] = 0.0;
      continue;
    }
    int arg = 0;
    double top = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double dot = lane_dot(r, centroids.data() + j * dim, dim);
      if (j == 0 || dot > top) {
        top = dot;
        arg = static_cast<int>(j);
      }
    }
    labels[i] = arg;
    best[i] = top;
  }
}

void accumulate_clusters(std::span<const float> rows, std::size_t dim, std::span<const int> labels,
                         std::size_t k, std::span<double> sums, std::span<std::size_t> counts) {
  std::fill(sums.begin(), sums.end(), 0.0);
  std::fill(counts.begin(), counts.end(), std::size_t{0});
  (void)k;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    ++counts[l];
    for (std::size_t d = 0; d < dim; ++d) sums[l * dim + d] += rows[i * dim + d];
  }
}

double sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void attribution_sums(std::span<const float> a, std::span<const float> u, std::size_t n,
                      std::size_t c_count, std::size_t k, std::size_t plane, std::span<double> m) {
  for (std::size_t kk = 0; kk < k; ++kk) {
    for (std::size_t c = 0; c < c_count; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const float* ap = a.data() + (i * c_count + c) * plane;
        const float* up = u.data() + (i * k + kk) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
          acc += static_cast<double>(ap[p]) * ap[p] * up[p];
        }
      }
      m[kk * c_count + c] = acc;
    }
  }
}

}  // namespace ganlocal::kernels::serial
