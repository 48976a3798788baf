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

#include "ganlocal/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "ganlocal/error.hpp"

namespace ganlocal::metrics {
namespace {

double srgb_decode(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

void require_same(const Image& a, const Image& b) {
  if (a.h != b.h || a.w != b.w || a.rgb.size() != b.rgb.size()) {
    throw Error(ErrorCode::kShapeMismatch, "images differ in size");
  }
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
  const double rl = srgb_decode(r);
  const double gl = srgb_decode(g);
  const double bl = srgb_decode(b);
  const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
  const double fx = lab_f(x / kWhiteX);
  const double fy = lab_f(y / kWhiteY);
  const double fz = lab_f(z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage srgb_to_lab(const Image& image) {
  LabImage out{image.h, image.w, std::vector<double>(3 * image.h * image.w)};
  const std::size_t plane = image.h * image.w;
  for (std::size_t i = 0; i < plane; ++i) {
    const auto lab = srgb_to_lab(image.rgb[i], image.rgb[plane + i], image.rgb[2 * plane + i]);
    for (std::size_t ch = 0; ch < 3; ++ch) out.lab[ch * plane + i] = lab[ch];
  }
  return out;
}

DiffMap diff_map(const Image& a, const Image& b) {
  require_same(a, b);
  const auto la = srgb_to_lab(a);
  const auto lb = srgb_to_lab(b);
  const std::size_t plane = a.h * a.w;
  DiffMap out{a.h, a.w, std::vector<double>(plane, 0.0)};
  for (std::size_t i = 0; i < plane; ++i) {
    double s = 0.0;
    for (std::size_t ch = 0; ch < 3; ++ch) {
      const double d = la.lab[ch * plane + i] - lb.lab[ch * plane + i];
      s += d * d;
    }
    out.values[i] = s;
  }
  return out;
}

std::size_t RoiMask::area() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

RoiMask roi_mask(const MembershipTensor& u, const std::vector<std::vector<int>>& groups,
                 const std::vector<int>& target_members, std::size_t out_h, std::size_t out_w) {
  const auto& s = u.tensor.shape();
  if (s.n != 1) throw Error(ErrorCode::kShapeMismatch, "roi_mask expects a single-sample membership");
  auto sorted = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto want = sorted(target_members);
  std::size_t target = groups.size();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int id : groups[g]) {
      if (id < 0 || static_cast<std::size_t>(id) >= s.c) {
        throw Error(ErrorCode::kUnknownCluster, "group references cluster " + std::to_string(id));
      }
    }
    if (sorted(groups[g]) == want) target = g;
  }
  if (target == groups.size()) throw Error(ErrorCode::kUnknownPart, "selected clusters do not form a region group");

  const MembershipTensor soft =
      (s.h == out_h && s.w == out_w) ? u : resample_membership(u, out_h, out_w);
  RoiMask mask{out_h, out_w, std::vector<std::uint8_t>(out_h * out_w, 0), ""};
  std::vector<double> totals(groups.size());
  for (std::size_t p = 0; p < out_h * out_w; ++p) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      double t = 0.0;
      for (int id : groups[g]) t += soft.tensor.plane(0, static_cast<std::size_t>(id))[p];
      totals[g] = t;
    }
    std::size_t arg = 0;
    for (std::size_t g = 1; g < groups.size(); ++g) {
      if (totals[g] > totals[arg]) arg = g;
    }
    mask.inside[p] = arg == target ? 1 : 0;
  }
  return mask;
}

LocalityReport locality(const Image& target, const Image& edited, const RoiMask& mask) {
  require_same(target, edited);
  if (mask.h != target.h || mask.w != target.w) throw Error(ErrorCode::kShapeMismatch, "mask size differs from image");
  const auto d = diff_map(target, edited);
  double in_sum = 0.0;
  double out_sum = 0.0;
  std::size_t in_count = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (mask.inside[i]) {
      in_sum += d.values[i];
      ++in_count;
    } else {
      out_sum += d.values[i];
    }
  }
  const std::size_t out_count = d.values.size() - in_count;
  LocalityReport r;
  if (in_count > 0) r.in_mse = in_sum / static_cast<double>(in_count);
  if (out_count > 0) r.out_mse = out_sum / static_cast<double>(out_count);
  r.roi_fraction = d.values.empty() ? 0.0 : static_cast<double>(in_count) / static_cast<double>(d.values.size());
  return r;
}

GaussianStats gaussian_stats(const std::vector<std::vector<double>>& features) {
  if (features.size() < 2) throw Error(ErrorCode::kTooFewSamples, "gaussian_stats needs at least 2 vectors");
  const std::size_t d = features.front().size();
  for (const auto& f : features) {
    if (f.size() != d) throw Error(ErrorCode::kDimensionMismatch, "feature vectors differ in length");
  }
  const auto n = static_cast<double>(features.size());
  GaussianStats s{d, std::vector<double>(d, 0.0), std::vector<double>(d * d, 0.0)};
  for (const auto& f : features) {
    for (std::size_t i = 0; i < d; ++i) s.mu[i] += f[i];
  }
  for (auto& m : s.mu) m /= n;
  for (const auto& f : features) {
    for (std::size_t i = 0; i < d; ++i) {
      const double di = f[i] - s.mu[i];
      for (std::size_t j = i; j < d; ++j) s.cov[i * d + j] += di * (f[j] - s.mu[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double v = s.cov[i * d + j] / (n - 1.0);
      s.cov[i * d + j] = v;
      s.cov[j * d + i] = v;
    }
  }
  return s;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.dim != b.dim || a.mu.size() != a.dim || b.mu.size() != b.dim || a.cov.size() != a.dim * a.dim ||
      b.cov.size() != b.dim * b.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "frechet_distance: statistics differ in dimension");
  }
  const auto d = static_cast<Eigen::Index>(a.dim);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::MatrixXd s1 = Eigen::Map<const RowMajor>(a.cov.data(), d, d);
  const Eigen::MatrixXd s2 = Eigen::Map<const RowMajor>(b.cov.data(), d, d);
  const Eigen::VectorXd diff =
      Eigen::Map<const Eigen::VectorXd>(a.mu.data(), d) - Eigen::Map<const Eigen::VectorXd>(b.mu.data(), d);
  const Eigen::MatrixXd r1 = sqrt_psd(0.5 * (s1 + s1.transpose()));
  Eigen::MatrixXd inner = r1 * s2 * r1;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
  const double cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double value = diff.squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross;
  return std::max(0.0, value);
}

std::vector<double> pooled_features(const Image& image, std::size_t grid) {
  if (grid == 0 || image.h % grid != 0 || image.w % grid != 0) {
    throw Error(ErrorCode::kShapeMismatch, "image size must be a multiple of the pooling grid");
  }
  const std::size_t ch_ = image.h / grid;
  const std::size_t cw = image.w / grid;
  std::vector<double> out(3 * grid * grid, 0.0);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    for (std::size_t y = 0; y < image.h; ++y) {
      for (std::size_t x = 0; x < image.w; ++x) {
        out[(ch * grid + y / ch_) * grid + x / cw] += image.at(ch, y, x);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(ch_ * cw);
  for (auto& v : out) v *= inv;
  return out;
}

}  // namespace ganlocal::metrics
