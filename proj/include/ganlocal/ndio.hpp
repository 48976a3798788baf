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
#include <vector>

#include "ganlocal/tensor.hpp"

namespace ganlocal {

// Hidden-layer activations captured from a generator.
struct ActivationTensor {
  Tensor4 tensor;
  int layer_id = -1;
  bool standardized = false;
  // Channels whose population std fell below kDeadChannelStd; zeroed.
  std::vector<std::size_t> dead_channels;
};

// Cluster memberships (n, K, h, w); each (n, h, w) fiber sums to one.
struct MembershipTensor {
  Tensor4 tensor;
  bool hard = false;

  std::size_t clusters() const { return tensor.shape().c; }
};

inline constexpr double kDeadChannelStd = 1e-8;

struct ChannelMoments {
  std::vector<double> mean;
  std::vector<double> stddev;  // population

  bool operator==(const ChannelMoments&) const = default;
};

// Per-channel mean and population std over (n, h, w), two-pass in double.
ChannelMoments channel_moments(const Tensor4& t);

ActivationTensor standardize(const ActivationTensor& a);

// Standardizes with externally supplied moments (e.g. those of the batch a
// catalog was built from). Channels with std < kDeadChannelStd become zero.
ActivationTensor standardize_with(const ActivationTensor& a, const ChannelMoments& m);

// Bilinear resampling, align_corners = false, source coordinates clamped to
// the valid range. Output is always soft.
MembershipTensor resample_membership(const MembershipTensor& u, std::size_t h2,
                                     std::size_t w2);

// One-hot membership from integer labels laid out (n, h, w).
MembershipTensor one_hot(const std::vector<int>& labels, std::size_t n, std::size_t k,
                         std::size_t h, std::size_t w);

// Largest |sum_k u - 1| over all positions.
double partition_error(const MembershipTensor& u);

}  // namespace ganlocal
