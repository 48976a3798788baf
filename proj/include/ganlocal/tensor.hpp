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
#include <span>
#include <string>
#include <vector>

namespace ganlocal {

struct Shape4 {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t size() const { return n * c * h * w; }
  std::size_t plane() const { return h * w; }
  bool operator==(const Shape4&) const = default;
};

std::string to_string(const Shape4& s);

/// Dense N x C x H x W float tensor, row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, float fill = 0.0f);
  Tensor4(Shape4 shape, std::vector<float> data);

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::vector<float>& storage() { return data_; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t h,
                    std::size_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  float& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[index(n, c, h, w)];
  }
  float at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[index(n, c, h, w)];
  }

  // Contiguous H x W plane of (n, c).
  std::span<float> plane(std::size_t n, std::size_t c) {
    return std::span<float>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }
  std::span<const float> plane(std::size_t n, std::size_t c) const {
    return std::span<const float>(data_).subspan(index(n, c, 0, 0),
                                                 shape_.plane());
  }

  bool all_finite() const;
  bool operator==(const Tensor4&) const = default;

 private:
  Shape4 shape_;
  std::vector<float> data_;
};

/// Array of rank 0..4 as read from or written to an array file.
struct NdArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  std::size_t count() const;
  bool operator==(const NdArray&) const = default;
};

/// Planar RGB image, 3 x h x w, values in [0, 1].
struct Image {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<float> rgb;

  float at(std::size_t ch, std::size_t y, std::size_t x) const { return rgb[(ch * h + y) * w + x]; }
  float& at(std::size_t ch, std::size_t y, std::size_t x) { return rgb[(ch * h + y) * w + x]; }
  bool operator==(const Image&) const = default;
};

// Left-pads the shape with ones up to rank 4.
Tensor4 to_tensor4(const NdArray& a);
NdArray to_ndarray(const Tensor4& t);
NdArray to_ndarray(const Tensor4& t, std::vector<std::size_t> shape);

}  // namespace ganlocal
