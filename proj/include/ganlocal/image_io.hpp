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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ganlocal/metrics.hpp"
#include "ganlocal/ndio.hpp"
#include "ganlocal/tensor.hpp"

namespace ganlocal::image_io {

using Bytes = std::vector<std::uint8_t>;

// 8-bit PNG; channels is 1 (gray) or 3 (RGB), pixels interleaved row-major.
Bytes encode_png(std::size_t width, std::size_t height, int channels, const std::vector<std::uint8_t>& pixels);

Bytes image_png(const Image& image);

// Grayscale PNG of the map scaled by its maximum (all-zero maps stay black).
struct Heatmap {
  Bytes png;
  double max_value = 0.0;
};
Heatmap diff_heatmap(const metrics::DiffMap& diff);

// Writes <stem>.png and <stem>.json ({"max": ..., "width": ..., "height": ...}).
void write_heatmap(const std::filesystem::path& stem, const metrics::DiffMap& diff);

// 15 maximally distinct colors used for cluster overlays; cluster k uses
// kPalette[k % 15].
extern const std::array<std::array<std::uint8_t, 3>, 15> kPalette;

// Image blended 50/50 with the color of the arg-max cluster of u (a single
// sample) after resampling u to the image size.
Bytes membership_overlay_png(const Image& image, const MembershipTensor& u);

std::string base64_encode(const Bytes& bytes);

}  // namespace ganlocal::image_io
