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

#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ganlocal/kernels.hpp"

using namespace ganlocal;
namespace k = ganlocal::kernels;

namespace {

std::vector<float> random_floats(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<float> d;
  std::vector<float> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return static_cast<std::size_t>(-i);
  if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * n - 2 - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

// Direct definition of a reflect-padded 3x3 convolution.
std::vector<double> conv_oracle(const k::ConvShape& s, const std::vector<float>& in, const std::vector<float>& w,
                                const std::vector<float>& b) {
  std::vector<double> out(s.cout * s.h * s.w);
  for (std::size_t o = 0; o < s.cout; ++o)
    for (std::size_t y = 0; y < s.h; ++y)
      for (std::size_t x = 0; x < s.w; ++x) {
        double acc = b[o];
        for (std::size_t i = 0; i < s.cin; ++i)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const std::size_t yy = reflect(static_cast<std::ptrdiff_t>(y) + dy, s.h);
              const std::size_t xx = reflect(static_cast<std::ptrdiff_t>(x) + dx, s.w);
              acc += static_cast<double>(w[((o * s.cin + i) * 3 + static_cast<std::size_t>(dy + 1)) * 3 +
                                           static_cast<std::size_t>(dx + 1)]) *
                     in[(i * s.h + yy) * s.w + xx];
            }
        out[(o * s.h + y) * s.w + x] = acc;
      }
  return out;
}

template <class F>
void for_thread_counts(F&& f) {
  const int saved = omp_get_max_threads();
  for (int t : {1, 2, 3, 8}) {
    omp_set_num_threads(t);
    f(t);
  }
  omp_set_num_threads(saved);
}

}  // namespace

TEST_CASE("conv3x3_reflect matches the direct definition") {
  for (const k::ConvShape s : {k::ConvShape{3, 4, 5, 7}, k::ConvShape{2, 1, 2, 2}, k::ConvShape{8, 5, 16, 16}}) {
    const auto in = random_floats(s.cin * s.h * s.w, 1);
    const auto w = random_floats(s.cout * s.cin * 9, 2);
    const auto b = random_floats(s.cout, 3);
    const auto expect = conv_oracle(s, in, w, b);
    std::vector<float> serial(expect.size()), par(expect.size());
    k::serial::conv3x3_reflect(s, in, w, b, serial);
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(serial[i] == doctest::Approx(expect[i]).epsilon(1e-5));
    for_thread_counts([&](int) {
      k::parallel::conv3x3_reflect(s, in, w, b, par);
      CHECK(par == serial);
    });
  }
}

TEST_CASE("assign_rows picks the best centroid with ties to the lowest index") {
  // Rows: tie between centroids 1 and 2, a zero row, and a clear winner.
  const std::vector<float> rows{0, 1, 0, 0, 0, 0, 1, 0, 0};
  const std::vector<float> cent{0, 0, 1, 0.6f, 0.8f, 0, 0.6f, 0.8f, 0};
  std::vector<int> labels(3);
  std::vector<double> best(3);
  k::serial::assign_rows(rows, 3, cent, 3, labels, best);
  CHECK(labels == std::vector<int>{1, 0, 1});
  CHECK(best[1] == 0.0);
  CHECK(best[2] == doctest::Approx(0.6));
}

TEST_CASE("assign_rows agrees with brute force and across thread counts") {
  const std::size_t n = 10000, dim = 13, kk = 7;
  const auto rows = random_floats(n * dim, 4);
  const auto cent = random_floats(kk * dim, 5);
  std::vector<int> labels(n);
  std::vector<double> best(n);
  k::serial::assign_rows(rows, dim, cent, kk, labels, best);
  for (std::size_t i = 0; i < n; ++i) {
    double top = -1e300;
    int arg = -1;
    for (std::size_t c = 0; c < kk; ++c) {
      double d = 0.0;
      for (std::size_t j = 0; j < dim; ++j) d += static_cast<double>(rows[i * dim + j]) * cent[c * dim + j];
      if (d > top + 1e-9) {
        top = d;
        arg = static_cast<int>(c);
      }
    }
    CHECK(labels[i] == arg);
    CHECK(best[i] == doctest::Approx(top).epsilon(1e-5));
  }
  for_thread_counts([&](int) {
    std::vector<int> l2(n);
    std::vector<double> b2(n);
    k::parallel::assign_rows(rows, dim, cent, kk, l2, b2);
    CHECK(l2 == labels);
    CHECK(b2 == best);
  });
}

TEST_CASE("accumulate_clusters and sum are exact and thread-count independent") {
  const std::size_t n = 9000, dim = 5, kk = 4;
  const auto rows = random_floats(n * dim, 6);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>((i * 7) % kk);
  std::vector<double> sums(kk * dim);
  std::vector<std::size_t> counts(kk);
  k::serial::accumulate_clusters(rows, dim, labels, kk, sums, counts);
  std::vector<double> naive(kk * dim, 0.0);
  std::vector<std::size_t> ncount(kk, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++ncount[static_cast<std::size_t>(labels[i])];
    for (std::size_t j = 0; j < dim; ++j) naive[static_cast<std::size_t>(labels[i]) * dim + j] += rows[i * dim + j];
  }
  CHECK(counts == ncount);
  for (std::size_t i = 0; i < naive.size(); ++i) CHECK(sums[i] == doctest::Approx(naive[i]).epsilon(1e-9));

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = rows[i];
  const double s = k::serial::sum(values);
  double naive_sum = 0.0;
  for (double v : values) naive_sum += v;
  CHECK(s == doctest::Approx(naive_sum).epsilon(1e-12));

  for_thread_counts([&](int) {
    std::vector<double> s2(kk * dim);
    std::vector<std::size_t> c2(kk);
    k::parallel::accumulate_clusters(rows, dim, labels, kk, s2, c2);
    CHECK(s2 == sums);
    CHECK(c2 == counts);
    CHECK(k::parallel::sum(values) == s);
  });
}

TEST_CASE("attribution_sums is the membership-weighted energy") {
  const std::size_t n = 3, c = 4, kk = 3, plane = 5000;
  const auto a = random_floats(n * c * plane, 7);
  auto u = random_floats(n * kk * plane, 8);
  for (auto& v : u) v = std::abs(v);
  std::vector<double> m(kk * c);
  k::serial::attribution_sums(a, u, n, c, kk, plane, m);
  for (std::size_t q = 0; q < kk; ++q)
    for (std::size_t ch = 0; ch < c; ++ch) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < plane; ++p) {
          const double av = a[(i * c + ch) * plane + p];
          acc += av * av * u[(i * kk + q) * plane + p];
        }
      CHECK(m[q * c + ch] == doctest::Approx(acc).epsilon(1e-10));
    }
  for_thread_counts([&](int) {
    std::vector<double> m2(kk * c);
    k::parallel::attribution_sums(a, u, n, c, kk, plane, m2);
    CHECK(m2 == m);
  });
}
