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

// Times each kernel in its serial reference and OpenMP form on
// pipeline-sized inputs and checks that both produce identical output.
//
//   bench_kernels [--reps N]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "ganlocal/kernels.hpp"
#include "ganlocal/rng.hpp"

namespace k = ganlocal::kernels;

namespace {

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  ganlocal::NormalStream rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.next());
  return v;
}

double best_ms(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-22s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--reps") reps = std::max(1, std::atoi(argv[i + 1]));
  }
  std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);
  bool ok = true;

  {  // one 32x32 synthesis layer
    const k::ConvShape s{48, 32, 32, 32};
    const auto in = random_floats(s.cin * s.h * s.w, 1);
    const auto w = random_floats(s.cout * s.cin * 9, 2);
    const auto b = random_floats(s.cout, 3);
    std::vector<float> o1(s.cout * s.h * s.w), o2(o1.size());
    const double ts = best_ms(reps, [&] { k::serial::conv3x3_reflect(s, in, w, b, o1); });
    const double tp = best_ms(reps, [&] { k::parallel::conv3x3_reflect(s, in, w, b, o2); });
    ok &= same_bits(o1, o2);
    report("conv3x3_reflect", ts, tp, same_bits(o1, o2));
  }

  // k-means over N=200 samples of the 32x32 base layer
  const std::size_t rows = 200 * 32 * 32, dim = 48, kk = 15;
  const auto data = random_floats(rows * dim, 4);
  const auto cent = random_floats(kk * dim, 5);
  std::vector<int> l1(rows), l2(rows);
  {
    std::vector<double> b1(rows), b2(rows);
    const double ts = best_ms(reps, [&] { k::serial::assign_rows(data, dim, cent, kk, l1, b1); });
    const double tp = best_ms(reps, [&] { k::parallel::assign_rows(data, dim, cent, kk, l2, b2); });
    const bool same = same_bits(l1, l2) && same_bits(b1, b2);
    ok &= same;
    report("assign_rows", ts, tp, same);
  }
  {
    std::vector<double> s1(kk * dim), s2(kk * dim);
    std::vector<std::size_t> c1(kk), c2(kk);
    const double ts = best_ms(reps, [&] { k::serial::accumulate_clusters(data, dim, l1, kk, s1, c1); });
    const double tp = best_ms(reps, [&] { k::parallel::accumulate_clusters(data, dim, l1, kk, s2, c2); });
    const bool same = same_bits(s1, s2) && same_bits(c1, c2);
    ok &= same;
    report("accumulate_clusters", ts, tp, same);
  }
  {
    std::vector<double> v(rows);
    for (std::size_t i = 0; i < rows; ++i) v[i] = data[i];
    double r1 = 0, r2 = 0;
    const double ts = best_ms(reps, [&] { r1 = k::serial::sum(v); });
    const double tp = best_ms(reps, [&] { r2 = k::parallel::sum(v); });
    ok &= r1 == r2;
    report("sum", ts, tp, r1 == r2);
  }
  {
    const std::size_t n = 200, c = 48, plane = 32 * 32;
    const auto a = random_floats(n * c * plane, 6);
    std::vector<float> u(n * kk * plane, 0.0f);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = 0; p < plane; ++p) u[(i * kk + static_cast<std::size_t>(l1[i * plane + p])) * plane + p] = 1.0f;
    std::vector<double> m1(kk * c), m2(kk * c);
    const double ts = best_ms(reps, [&] { k::serial::attribution_sums(a, u, n, c, kk, plane, m1); });
    const double tp = best_ms(reps, [&] { k::parallel::attribution_sums(a, u, n, c, kk, plane, m2); });
    const bool same = same_bits(m1, m2);
    ok &= same;
    report("attribution_sums", ts, tp, same);
  }
  return ok ? 0 : 1;
}
