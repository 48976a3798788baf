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

#include <omp.h>

#include <algorithm>
#include <vector>

#include "ganlocal/kernels.hpp"
#include "kernels_common.hpp"

namespace ganlocal::kernels::parallel {
namespace {

std::size_t chunk_count(std::size_t rows) { return (rows + kChunkRows - 1) / kChunkRows; }

// Copies each h x w channel into an (h+2) x (w+2) buffer with a one-pixel
// reflected border.
std::vector<float> reflect_pad(const ConvShape& s, std::span<const float> in) {
  const std::size_t ph = s.h + 2;
  const std::size_t pw = s.w + 2;
  std::vector<float> pad(s.cin * ph * pw);
  auto src_index = [](std::ptrdiff_t i, std::size_t n) -> std::size_t {
    if (n == 1) return 0;
    if (i < 0) return static_cast<std::size_t>(-i);
    if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * n - 2 - static_cast<std::size_t>(i);
    return static_cast<std::size_t>(i);
  };
  for (std::size_t ci = 0; ci < s.cin; ++ci) {
    for (std::size_t y = 0; y < ph; ++y) {
      const std::size_t sy = src_index(static_cast<std::ptrdiff_t>(y) - 1, s.h);
      for (std::size_t x = 0; x < pw; ++x) {
        const std::size_t sx = src_index(static_cast<std::ptrdiff_t>(x) - 1, s.w);
        pad[(ci * ph + y) * pw + x] = in[(ci * s.h + sy) * s.w + sx];
      }
    }
  }
  return pad;
}

}  // namespace

void conv3x3_reflect(const ConvShape& s, std::span<const float> in, std::span<const float> weight,
                     std::span<const float> bias, std::span<float> out) {
  const std::vector<float> pad = reflect_pad(s, in);
  const std::size_t ph = s.h + 2;
  const std::size_t pw = s.w + 2;
  const auto cout = static_cast<std::ptrdiff_t>(s.cout);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t co = 0; co < cout; ++co) {
    float* o = out.data() + static_cast<std::size_t>(co) * s.h * s.w;
    std::fill(o, o + s.h * s.w, bias[static_cast<std::size_t>(co)]);
    for (std::size_t ci = 0; ci < s.cin; ++ci) {
      const float* wk = weight.data() + (static_cast<std::size_t>(co) * s.cin + ci) * 9;
      const float* p = pad.data() + ci * ph * pw;
      for (std::size_t y = 0; y < s.h; ++y) {
        float* orow = o + y * s.w;
        for (std::size_t ky = 0; ky < 3; ++ky) {
          const float* prow = p + (y + ky) * pw;
          for (std::size_t kx = 0; kx < 3; ++kx) {
            const float wv = wk[ky * 3 + kx];
            const float* src = prow + kx;
            for (std::size_t x = 0; x < s.w; ++x) orow[x] += wv * src[x];
          }
        }
      }
    }
  }
}

void assign_rows(std::span<const float> rows, std::size_t dim, std::span<const float> centroids,
                 std::size_t k, std::span<int> labels, std::span<double> best) {
  const auto n = static_cast<std::ptrdiff_t>(labels.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
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
  const std::size_t nrows = labels.size();
  const std::size_t chunks = chunk_count(nrows);
  std::vector<double> part_sums(chunks * k * dim, 0.0);
  std::vector<std::size_t> part_counts(chunks * k, 0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < nchunks; ++cc) {
    const auto ch = static_cast<std::size_t>(cc);
    double* ps = part_sums.data() + ch * k * dim;
    std::size_t* pc = part_counts.data() + ch * k;
    const std::size_t end = std::min(nrows, (ch + 1) * kChunkRows);
    for (std::size_t i = ch * kChunkRows; i < end; ++i) {
      const auto l = static_cast<std::size_t>(labels[i]);
      ++pc[l];
      const float* r = rows.data() + i * dim;
      for (std::size_t d = 0; d < dim; ++d) ps[l * dim + d] += r[d];
    }
  }
  std::fill(sums.begin(), sums.end(), 0.0);
  std::fill(counts.begin(), counts.end(), std::size_t{0});
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    for (std::size_t j = 0; j < k * dim; ++j) sums[j] += part_sums[ch * k * dim + j];
    for (std::size_t j = 0; j < k; ++j) counts[j] += part_counts[ch * k + j];
  }
}

double sum(std::span<const double> values) {
  const std::size_t chunks = chunk_count(values.size());
  std::vector<double> partial(chunks, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < nchunks; ++cc) {
    const auto ch = static_cast<std::size_t>(cc);
    const std::size_t end = std::min(values.size(), (ch + 1) * kChunkRows);
    double s = 0.0;
    for (std::size_t i = ch * kChunkRows; i < end; ++i) s += values[i];
    partial[ch] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void attribution_sums(std::span<const float> a, std::span<const float> u, std::size_t n,
                      std::size_t c_count, std::size_t k, std::size_t plane, std::span<double> m) {
  const auto channels = static_cast<std::ptrdiff_t>(c_count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < channels; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    for (std::size_t kk = 0; kk < k; ++kk) {
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

}  // namespace ganlocal::kernels::parallel
