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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ganlocal/ndio.hpp"
#include "ganlocal/tensor.hpp"

namespace ganlocal::metrics {

// D65 reference white for CIELAB.
inline constexpr double kWhiteX = 0.95047;
inline constexpr double kWhiteY = 1.0;
inline constexpr double kWhiteZ = 1.08883;

struct LabImage {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> lab;  // 3 x h x w: L*, a*, b*
};

std::array<double, 3> srgb_to_lab(double r, double g, double b);
LabImage srgb_to_lab(const Image& image);

struct DiffMap {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> values;  // squared CIELAB distance per pixel
};

DiffMap diff_map(const Image& a, const Image& b);

struct RoiMask {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<std::uint8_t> inside;
  std::string part;

  std::size_t area() const;
};

// u is a single-sample membership (1, K, h, w); groups partition the K
// clusters. A pixel belongs to the ROI when the target group's resampled
// membership is the largest of all groups there (ties go to the earlier
// group). Throws UnknownPart if target_members is not one of the groups.
RoiMask roi_mask(const MembershipTensor& u, const std::vector<std::vector<int>>& groups,
                 const std::vector<int>& target_members, std::size_t out_h, std::size_t out_w);

struct LocalityReport {
  std::optional<double> in_mse;   // absent when the ROI is empty
  std::optional<double> out_mse;  // absent when the ROI covers the image
  double roi_fraction = 0.0;
};

LocalityReport locality(const Image& target, const Image& edited, const RoiMask& mask);

struct GaussianStats {
  std::size_t dim = 0;
  std::vector<double> mu;
  std::vector<double> cov;  // dim x dim, symmetric
};

GaussianStats gaussian_stats(const std::vector<std::vector<double>>& features);

// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2), with matrix
// square roots from symmetric eigendecompositions clamping negative
// eigenvalues to zero.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

// Default feature extractor: the image average-pooled to grid x grid cells
// per channel (3 * grid * grid values).
std::vector<double> pooled_features(const Image& image, std::size_t grid = 8);

}  // namespace ganlocal::metrics
