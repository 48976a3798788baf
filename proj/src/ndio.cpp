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

#include "ganlocal/ndio.hpp"

#include <algorithm>
#include <cmath>

#include "ganlocal/error.hpp"

namespace ganlocal {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kUnsupportedLayout: return "UnsupportedLayout";
    case ErrorCode::kUnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::kBadArchive: return "BadArchive";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kUnknownCluster: return "UnknownCluster";
    case ErrorCode::kUnknownPart: return "UnknownPart";
    case ErrorCode::kAlreadyAssigned: return "AlreadyAssigned";
    case ErrorCode::kMissingLayerAttribution: return "MissingLayerAttribution";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_string(const Shape4& s) {
  return "(" + std::to_string(s.n) + ", " + std::to_string(s.c) + ", " + std::to_string(s.h) +
         ", " + std::to_string(s.w) + ")";
}

Tensor4::Tensor4(Shape4 shape, float fill) : shape_(shape), data_(shape.size(), fill) {}

Tensor4::Tensor4(Shape4 shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                    to_string(shape_));
  }
}

bool Tensor4::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

std::size_t NdArray::count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor4 to_tensor4(const NdArray& a) {
  if (a.shape.size() > 4) throw Error(ErrorCode::kUnsupportedLayout, "rank > 4");
  std::vector<std::size_t> dims(4 - a.shape.size(), 1);
  dims.insert(dims.end(), a.shape.begin(), a.shape.end());
  Tensor4 t(Shape4{dims[0], dims[1], dims[2], dims[3]}, a.data);
  if (!t.all_finite()) throw Error(ErrorCode::kInvalidArgument, "array contains non-finite values");
  return t;
}

NdArray to_ndarray(const Tensor4& t) {
  const auto& s = t.shape();
  return NdArray{{s.n, s.c, s.h, s.w}, std::vector<float>(t.data().begin(), t.data().end())};
}

NdArray to_ndarray(const Tensor4& t, std::vector<std::size_t> shape) {
  NdArray a{std::move(shape), std::vector<float>(t.data().begin(), t.data().end())};
  if (a.count() != a.data.size()) throw Error(ErrorCode::kShapeMismatch, "reshape size mismatch");
  return a;
}

ChannelMoments channel_moments(const Tensor4& t) {
  const auto& s = t.shape();
  const double count = static_cast<double>(s.n * s.plane());
  ChannelMoments m;
  m.mean.assign(s.c, 0.0);
  m.stddev.assign(s.c, 0.0);
  for (std::size_t c = 0; c < s.c; ++c) {
    double sum = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      for (float v : t.plane(n, c)) sum += v;
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      for (float v : t.plane(n, c)) sq += (v - mean) * (v - mean);
    }
    m.mean[c] = mean;
    m.stddev[c] = std::sqrt(sq / count);
  }
  return m;
}

ActivationTensor standardize_with(const ActivationTensor& a, const ChannelMoments& m) {
  const auto& s = a.tensor.shape();
  if (m.mean.size() != s.c || m.stddev.size() != s.c) {
    throw Error(ErrorCode::kShapeMismatch, "moments do not match channel count");
  }
  ActivationTensor out;
  out.layer_id = a.layer_id;
  out.standardized = true;
  out.tensor = Tensor4(s);
  for (std::size_t c = 0; c < s.c; ++c) {
    if (!(m.stddev[c] >= kDeadChannelStd)) {
      out.dead_channels.push_back(c);
      continue;
    }
    const double inv = 1.0 / m.stddev[c];
    for (std::size_t n = 0; n < s.n; ++n) {
      auto src = a.tensor.plane(n, c);
      auto dst = out.tensor.plane(n, c);
      for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>((src[i] - m.mean[c]) * inv);
      }
    }
  }
  return out;
}

ActivationTensor standardize(const ActivationTensor& a) {
  if (a.tensor.empty()) throw Error(ErrorCode::kInvalidArgument, "standardize: empty tensor");
  return standardize_with(a, channel_moments(a.tensor));
}

namespace {

struct Tap {
  std::size_t i0, i1;
  double frac;
};

std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t o = 0; o < out; ++o) {
    double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    const std::size_t i1 = std::min(i0 + 1, in - 1);
    taps[o] = {i0, i1, src - static_cast<double>(i0)};
  }
  return taps;
}

}  // namespace

MembershipTensor resample_membership(const MembershipTensor& u, std::size_t h2, std::size_t w2) {
  if (h2 == 0 || w2 == 0) throw Error(ErrorCode::kInvalidArgument, "resample: target size must be >= 1");
  const auto& s = u.tensor.shape();
  MembershipTensor out;
  out.hard = false;
  out.tensor = Tensor4(Shape4{s.n, s.c, h2, w2});
  const auto ty = bilinear_taps(s.h, h2);
  const auto tx = bilinear_taps(s.w, w2);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t k = 0; k < s.c; ++k) {
      auto src = u.tensor.plane(n, k);
      auto dst = out.tensor.plane(n, k);
      for (std::size_t y = 0; y < h2; ++y) {
        const auto& a = ty[y];
        for (std::size_t x = 0; x < w2; ++x) {
          const auto& b = tx[x];
          const double top = (1.0 - b.frac) * src[a.i0 * s.w + b.i0] + b.frac * src[a.i0 * s.w + b.i1];
          const double bot = (1.0 - b.frac) * src[a.i1 * s.w + b.i0] + b.frac * src[a.i1 * s.w + b.i1];
          dst[y * w2 + x] = static_cast<float>((1.0 - a.frac) * top + a.frac * bot);
        }
      }
    }
  }
  return out;
}

MembershipTensor one_hot(const std::vector<int>& labels, std::size_t n, std::size_t k,
                         std::size_t h, std::size_t w) {
  if (labels.size() != n * h * w) throw Error(ErrorCode::kShapeMismatch, "one_hot: label count");
  MembershipTensor u;
  u.hard = true;
  u.tensor = Tensor4(Shape4{n, k, h, w});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < h * w; ++p) {
      const int label = labels[i * h * w + p];
      if (label < 0 || static_cast<std::size_t>(label) >= k) {
        throw Error(ErrorCode::kUnknownCluster, "one_hot: label out of range");
      }
      u.tensor.plane(i, static_cast<std::size_t>(label))[p] = 1.0f;
    }
  }
  return u;
}

double partition_error(const MembershipTensor& u) {
  const auto& s = u.tensor.shape();
  double worst = 0.0;
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t p = 0; p < s.plane(); ++p) {
      double sum = 0.0;
      for (std::size_t k = 0; k < s.c; ++k) sum += u.tensor.plane(n, k)[p];
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return worst;
}

}  // namespace ganlocal
