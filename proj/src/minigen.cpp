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

#include "ganlocal/minigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ganlocal/error.hpp"
#include "ganlocal/kernels.hpp"
#include "ganlocal/rng.hpp"

namespace ganlocal::minigen {
namespace {

constexpr std::uint64_t kLatentStreamSalt = 0x9E3779B97F4A7C15ull;

std::vector<float> draw(NormalStream& rng, std::size_t count) {
  std::vector<float> out(count);
  for (auto& v : out) v = static_cast<float>(kWeightStd * rng.next());
  return out;
}

std::vector<float> scaled(const std::vector<float>& stored, std::size_t fan_in) {
  std::vector<float> out(stored);
  const float g = runtime_gain(fan_in);
  for (auto& v : out) v *= g;
  return out;
}

float leaky(float v) { return v >= 0.0f ? v : kLeakySlope * v; }

// out = leaky?(W x + b) with W already scaled.
std::vector<float> dense(const std::vector<float>& weight, const std::vector<float>& bias,
                         const std::vector<float>& x, bool activate) {
  const std::size_t out_dim = bias.size();
  const std::size_t in_dim = x.size();
  std::vector<float> y(out_dim);
  for (std::size_t o = 0; o < out_dim; ++o) {
    float acc = bias[o];
    for (std::size_t i = 0; i < in_dim; ++i) acc += weight[o * in_dim + i] * x[i];
    y[o] = activate ? leaky(acc) : acc;
  }
  return y;
}

void instance_normalize(std::vector<float>& x, std::size_t channels, std::size_t plane) {
  for (std::size_t c = 0; c < channels; ++c) {
    float* p = x.data() + c * plane;
    double mean = 0.0;
    for (std::size_t i = 0; i < plane; ++i) mean += p[i];
    mean /= static_cast<double>(plane);
    double var = 0.0;
    for (std::size_t i = 0; i < plane; ++i) var += (p[i] - mean) * (p[i] - mean);
    var /= static_cast<double>(plane);
    const double inv = 1.0 / std::sqrt(var + kNormEps);
    for (std::size_t i = 0; i < plane; ++i) p[i] = static_cast<float>((p[i] - mean) * inv);
  }
}

std::vector<float> upsample_nearest(const std::vector<float>& x, std::size_t channels,
                                    std::size_t r, std::size_t r2) {
  const std::size_t f = r2 / r;
  std::vector<float> out(channels * r2 * r2);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < r2; ++y) {
      for (std::size_t xx = 0; xx < r2; ++xx) {
        out[(c * r2 + y) * r2 + xx] = x[(c * r + y / f) * r + xx / f];
      }
    }
  }
  return out;
}

void validate(const GeneratorConfig& c) {
  if (c.widths.empty() || c.widths.size() != c.resolutions.size() || c.latent_dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "generator: layer plan must be non-empty and consistent");
  }
  for (std::size_t l = 0; l + 1 < c.resolutions.size(); ++l) {
    const auto r = c.resolutions[l];
    const auto r2 = c.resolutions[l + 1];
    if (r == 0 || r2 < r || r2 % r != 0) {
      throw Error(ErrorCode::kInvalidArgument, "generator: resolutions must grow by integer factors");
    }
  }
  if (c.base_layer < 0 || static_cast<std::size_t>(c.base_layer) >= c.layers()) {
    throw Error(ErrorCode::kInvalidArgument, "generator: base layer outside the plan");
  }
}


}  // namespace

float runtime_gain(std::size_t fan_in) {
  return static_cast<float>(1.0 / (kWeightStd * std::sqrt(static_cast<double>(fan_in))));
}

LatentVector latent_from_seed(std::uint64_t seed, std::size_t dim) {
  NormalStream rng(seed ^ kLatentStreamSalt);
  LatentVector z;
  z.z.resize(dim);
  for (auto& v : z.z) v = static_cast<float>(rng.next());
  return z;
}

Generator::Generator(GeneratorConfig config) : config_(std::move(config)) {
  validate(config_);
  const std::size_t d = config_.latent_dim;
  const std::size_t layers = config_.layers();
  NormalStream rng(config_.seed);
  const std::size_t r0 = config_.resolutions[0];
  weights_.constant = draw(rng, config_.widths[0] * r0 * r0);
  weights_.map1 = draw(rng, d * d);
  weights_.map1_bias.assign(d, 0.0f);
  weights_.map2 = draw(rng, d * d);
  weights_.map2_bias.assign(d, 0.0f);
  for (std::size_t l = 0; l < layers; ++l) {
    weights_.style_affine.push_back(draw(rng, config_.widths[l] * d));
    weights_.style_bias.emplace_back(config_.widths[l], kStyleBiasInit);
    weights_.conv.push_back(draw(rng, config_.conv_out(l) * config_.widths[l] * 9));
    weights_.conv_bias.emplace_back(config_.conv_out(l), 0.0f);
  }
  weights_.torgb = draw(rng, 3 * config_.widths.back());
  weights_.torgb_bias.assign(3, 0.0f);
}

std::uint64_t Generator::weight_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const std::vector<float>& v) {
    for (float f : v) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      for (int i = 0; i < 4; ++i) {
        h ^= (bits >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
      }
    }
  };
  feed(weights_.constant);
  feed(weights_.map1);
  feed(weights_.map2);
  for (std::size_t l = 0; l < config_.layers(); ++l) {
    feed(weights_.style_affine[l]);
    feed(weights_.conv[l]);
  }
  feed(weights_.torgb);
  return h;
}

IntermediateLatent Generator::map_latent(const LatentVector& z) const {
  const std::size_t d = config_.latent_dim;
  if (z.z.size() != d) throw Error(ErrorCode::kShapeMismatch, "map_latent: latent dimension");
  const auto h = dense(scaled(weights_.map1, d), weights_.map1_bias, z.z, true);
  return IntermediateLatent{dense(scaled(weights_.map2, d), weights_.map2_bias, h, true)};
}

StyleSet Generator::styles_from_w(const IntermediateLatent& w) const {
  const std::size_t d = config_.latent_dim;
  if (w.w.size() != d) throw Error(ErrorCode::kShapeMismatch, "styles_from_w: latent dimension");
  StyleSet s;
  for (std::size_t l = 0; l < config_.layers(); ++l) {
    s.sigma.push_back(dense(scaled(weights_.style_affine[l], d), weights_.style_bias[l], w.w, false));
  }
  return s;
}

RenderResult Generator::synthesize(const StyleSet& styles, const std::set<int>& capture_layers) const {
  const std::size_t layers = config_.layers();
  if (styles.sigma.size() != layers) {
    throw Error(ErrorCode::kShapeMismatch, "synthesize: expected " + std::to_string(layers) +
                                               " style vectors, got " + std::to_string(styles.sigma.size()));
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (styles.sigma[l].size() != config_.widths[l]) {
      throw Error(ErrorCode::kShapeMismatch, "synthesize: style " + std::to_string(l) + " has " +
                                                 std::to_string(styles.sigma[l].size()) + " entries, plan says " +
                                                 std::to_string(config_.widths[l]));
    }
  }

  RenderResult result;
  std::vector<float> x = weights_.constant;
  std::size_t r = config_.resolutions[0];
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t cin = config_.widths[l];
    const std::size_t plane = r * r;
    if (capture_layers.count(static_cast<int>(l)) != 0) {
      ActivationTensor cap;
      cap.layer_id = static_cast<int>(l);
      cap.tensor = Tensor4(Shape4{1, cin, r, r}, x);
      result.captures.emplace(static_cast<int>(l), std::move(cap));
    }
    instance_normalize(x, cin, plane);
    for (std::size_t c = 0; c < cin; ++c) {
      const float s = styles.sigma[l][c];
      for (std::size_t i = 0; i < plane; ++i) x[c * plane + i] *= s;
    }
    const std::size_t r_next = l + 1 < layers ? config_.resolutions[l + 1] : r;
    if (r_next != r) {
      x = upsample_nearest(x, cin, r, r_next);
      r = r_next;
    }
    const std::size_t cout = config_.conv_out(l);
    std::vector<float> y(cout * r * r);
    kernels::parallel::conv3x3_reflect(kernels::ConvShape{cin, cout, r, r}, x,
                                       scaled(weights_.conv[l], cin * 9), weights_.conv_bias[l], y);
    for (auto& v : y) v = leaky(v);
    x = std::move(y);
  }

  const std::size_t cfin = config_.widths.back();
  const std::size_t plane = r * r;
  const auto rgbw = scaled(weights_.torgb, cfin);
  result.image.h = r;
  result.image.w = r;
  result.image.rgb.resize(3 * plane);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    for (std::size_t i = 0; i < plane; ++i) {
      float acc = weights_.torgb_bias[ch];
      for (std::size_t c = 0; c < cfin; ++c) acc += rgbw[ch * cfin + c] * x[c * plane + i];
      result.image.rgb[ch * plane + i] = std::clamp(kRgbOffset + kRgbScale * acc, 0.0f, 1.0f);
    }
  }
  return result;
}

RenderResult Generator::render(const LatentVector& z, const std::set<int>& capture_layers) const {
  return synthesize(styles_from_w(map_latent(z)), capture_layers);
}

StyleSet Generator::styles_for_seed(std::uint64_t seed) const {
  return styles_from_w(map_latent(latent_from_seed(seed, config_.latent_dim)));
}

Generator build_generator(const GeneratorConfig& config) { return Generator(config); }

std::set<int> all_layers(const GeneratorConfig& config) {
  std::set<int> s;
  for (std::size_t l = 0; l < config.layers(); ++l) s.insert(static_cast<int>(l));
  return s;
}

}  // namespace ganlocal::minigen
