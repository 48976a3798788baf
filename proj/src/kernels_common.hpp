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

#include <cstddef>

namespace ganlocal::kernels {

inline constexpr std::size_t kDotLanes = 8;

// Dot product with kDotLanes float partial sums combined in lane order.
// Both kernel flavours use it, so their assignments agree bit for bit.
inline double lane_dot(const float* a, const float* b, std::size_t n) {
  float lanes[kDotLanes] = {};
  std::size_t i = 0;
  for (; i + kDotLanes <= n; i += kDotLanes) {
    for (std::size_t l = 0; l < kDotLanes; ++l) lanes[l] += a[i + l] * b[i + l];
  }
  for (; i < n; ++i) lanes[i % kDotLanes] += a[i] * b[i];
  double total = 0.0;
  for (float v : lanes) total += v;
  return total;
}

}  // namespace ganlocal::kernels
