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

#include "ganlocal/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "ganlocal/error.hpp"
#include "ganlocal/npy.hpp"

namespace ganlocal::image_io {
namespace {

void put_be32(Bytes& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void chunk(Bytes& out, const char* type, const Bytes& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

const std::array<std::array<std::uint8_t, 3>, 15> kPalette = {{
    {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},  {245, 130, 48},
    {145, 30, 180},  {70, 240, 240},  {240, 50, 230}, {210, 245, 60}, {250, 190, 212},
    {0, 128, 128},   {220, 190, 255}, {170, 110, 40}, {128, 0, 0},    {0, 0, 128},
}};

Bytes encode_png(std::size_t width, std::size_t height, int channels, const std::vector<std::uint8_t>& pixels) {
  if ((channels != 1 && channels != 3) || pixels.size() != width * height * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::kShapeMismatch, "encode_png: pixel buffer does not match size");
  }
  const std::size_t stride = width * static_cast<std::size_t>(channels);
  Bytes raw;
  raw.reserve((stride + 1) * height);
  for (std::size_t y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), pixels.begin() + static_cast<std::ptrdiff_t>(y * stride),
               pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * stride));
  }
  uLongf zsize = compressBound(static_cast<uLong>(raw.size()));
  Bytes z(zsize);
  if (compress2(z.data(), &zsize, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error(ErrorCode::kIoError, "encode_png: deflate failed");
  }
  z.resize(zsize);

  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  Bytes ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);
  ihdr.push_back(channels == 1 ? 0 : 2);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  chunk(out, "IHDR", ihdr);
  chunk(out, "IDAT", z);
  chunk(out, "IEND", {});
  return out;
}

Bytes image_png(const Image& image) {
  const std::size_t plane = image.h * image.w;
  std::vector<std::uint8_t> px(3 * plane);
  for (std::size_t i = 0; i < plane; ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) px[3 * i + ch] = to_byte(image.rgb[ch * plane + i]);
  }
  return encode_png(image.w, image.h, 3, px);
}

Heatmap diff_heatmap(const metrics::DiffMap& diff) {
  Heatmap out;
  for (double v : diff.values) out.max_value = std::max(out.max_value, v);
  std::vector<std::uint8_t> px(diff.values.size(), 0);
  if (out.max_value > 0.0) {
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = to_byte(diff.values[i] / out.max_value);
  }
  out.png = encode_png(diff.w, diff.h, 1, px);
  return out;
}

void write_heatmap(const std::filesystem::path& stem, const metrics::DiffMap& diff) {
  const auto heat = diff_heatmap(diff);
  auto png_path = stem;
  png_path += ".png";
  npy::write_file(png_path, heat.png);
  const nlohmann::json side = {{"max", heat.max_value}, {"width", diff.w}, {"height", diff.h}};
  const std::string text = side.dump(2) + "\n";
  auto json_path = stem;
  json_path += ".json";
  npy::write_file(json_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Bytes membership_overlay_png(const Image& image, const MembershipTensor& u) {
  const auto& s = u.tensor.shape();
  if (s.n != 1) throw Error(ErrorCode::kShapeMismatch, "overlay expects a single-sample membership");
  const MembershipTensor up = (s.h == image.h && s.w == image.w) ? u : resample_membership(u, image.h, image.w);
  const std::size_t plane = image.h * image.w;
  std::vector<std::uint8_t> px(3 * plane);
  for (std::size_t i = 0; i < plane; ++i) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < s.c; ++k) {
      if (up.tensor.plane(0, k)[i] > up.tensor.plane(0, arg)[i]) arg = k;
    }
    const auto& color = kPalette[arg % kPalette.size()];
    for (std::size_t ch = 0; ch < 3; ++ch) {
      const double v = 0.5 * image.rgb[ch * plane + i] + 0.5 * (color[ch] / 255.0);
      px[3 * i + ch] = to_byte(v);
    }
  }
  return encode_png(image.w, image.h, 3, px);
}

std::string base64_encode(const Bytes& bytes) {
  static constexpr char kTable[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kTable[(v >> 18) & 63];
    out += kTable[(v >> 12) & 63];
    out += kTable[(v >> 6) & 63];
    out += kTable[v & 63];
  }
  if (i < bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (i + 1 < bytes.size() ? bytes[i + 1] << 8 : 0);
    out += kTable[(v >> 18) & 63];
    out += kTable[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kTable[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

}  // namespace ganlocal::image_io
