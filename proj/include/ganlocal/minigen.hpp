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

// A miniature style-based generator: mapping network z -> w, per-layer
// affine styles sigma_l = A_l w + b_l, and a synthesis network running from
// a learned constant where each block scales its normalized input channels
// by sigma_l before convolving. Small enough to render in milliseconds on a
// CPU, so the editing pipeline can run end to end without pretrained
// weights.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ganlocal/ndio.hpp"
#include "ganlocal/tensor.hpp"

namespace ganlocal::minigen {

struct GeneratorConfig {
  std::uint64_t seed = 0;
  std::size_t latent_dim = 64;
  // Resolution and channel width of the tensor entering each styled layer.
  std::vector<std::size_t> resolutions{4, 8, 8, 16, 16, 32, 32};
  std::vector<std::size_t> widths{64, 64, 64, 64, 48, 48, 32};
  // Default base layer for clustering: the first 32x32 layer.
  int base_layer = 5;

  std::size_t layers() const { return widths.size(); }
  std::size_t output_size() const { return resolutions.back(); }
  // Channels produced by the convolution of layer l.
  std::size_t conv_out(std::size_t l) const {
    return l + 1 < widths.size() ? widths[l + 1] : widths.back();
  }
};

inline constexpr double kWeightStd = 0.02;
inline constexpr float kLeakySlope = 0.2f;
inline constexpr float kStyleBiasInit = 1.0f;
inline constexpr float kNormEps = 1e-8f;
// image = clamp(kRgbOffset + kRgbScale * torgb(x), 0, 1)
inline constexpr float kRgbOffset = 0.5f;
inline constexpr float kRgbScale = 0.25f;

struct LatentVector {
  std::vector<float> z;
};

struct IntermediateLatent {
  std::vector<float> w;
};

struct StyleSet {
  std::vector<std::vector<float>> sigma;  // one entry per styled layer

  bool operator==(const StyleSet&) const = default;
};

struct RenderResult {
  Image image;
  std::map<int, ActivationTensor> captures;  // unstandardized, n = 1
};

// Stored parameters. Every matrix is row-major (out x in) and drawn from
// N(0, kWeightStd^2); at run time a matrix with fan-in f is multiplied by
// 1 / (kWeightStd * sqrt(f)) so that effective weights have variance 1/f.
struct Weights {
  std::vector<float> constant;        // widths[0] x r0 x r0
  std::vector<float> map1, map1_bias;  // d x d, d
  std::vector<float> map2, map2_bias;  // d x d, d
  std::vector<std::vector<float>> style_affine;  // widths[l] x d
  std::vector<std::vector<float>> style_bias;    // widths[l], all kStyleBiasInit
  std::vector<std::vector<float>> conv;          // conv_out(l) x widths[l] x 3 x 3
  std::vector<std::vector<float>> conv_bias;     // conv_out(l)
  std::vector<float> torgb, torgb_bias;          // 3 x widths.back(), 3
};

// Run-time multiplier for a matrix with the given fan-in.
float runtime_gain(std::size_t fan_in);

LatentVector latent_from_seed(std::uint64_t seed, std::size_t dim = 64);

class Generator {
 public:
  explicit Generator(GeneratorConfig config);

  const GeneratorConfig& config() const { return config_; }
  const Weights& weights() const { return weights_; }

  // FNV-1a over the stored weights in traversal order.
  std::uint64_t weight_checksum() const;

  IntermediateLatent map_latent(const LatentVector& z) const;
  StyleSet styles_from_w(const IntermediateLatent& w) const;
  RenderResult synthesize(const StyleSet& styles, const std::set<int>& capture_layers = {}) const;
  RenderResult render(const LatentVector& z, const std::set<int>& capture_layers = {}) const;

  StyleSet styles_for_seed(std::uint64_t seed) const;

 private:
  GeneratorConfig config_;
  Weights weights_;
};

Generator build_generator(const GeneratorConfig& config);

std::set<int> all_layers(const GeneratorConfig& config);

}  // namespace ganlocal::minigen
