// Copyright 2026 The Anisotable Authors.
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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "anisotable/kernels.hpp"
#include "anisotable/rng.hpp"

using namespace anisotable;
namespace k = anisotable::kernels;

namespace {

std::vector<double> normals(Rng& g, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * standard_normal(g);
  return v;
}

double naive_1d(const std::vector<double>& s, double x, double inv_h) {
  double acc = 0.0;
  for (double v : s) {
    const double u = (x - v) * inv_h;
    acc += std::exp(-0.5 * u * u);
  }
  return acc;
}

}  // namespace

TEST_CASE("scalar kernels match the textbook sums") {
  Rng g(1, 0);
  const auto s = normals(g, 1001, 2.0);
  for (double x : {-3.0, 0.0, 0.7, 5.0}) {
    CHECK(k::scalar::gaussian_sum_1d(s, x, 1.7) == doctest::Approx(naive_1d(s, x, 1.7)).epsilon(1e-14));
    std::size_t c = 0;
    for (double v : s) c += v > x ? 1 : 0;
    CHECK(k::scalar::count_greater(s, x) == c);
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::isa_available(k::Isa::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
    return;
  }
  Rng g(2, 0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 1000u, 4099u}) {
    const auto xs = normals(g, n, 1.5);
    const auto ys = normals(g, n, 0.8);
    for (int rep = 0; rep < 20; ++rep) {
      const double px = 2.0 * standard_normal(g);
      const double py = 2.0 * standard_normal(g);
      const double inv_h = std::exp(2.0 * standard_normal(g));
      const double a1 = k::scalar::gaussian_sum_1d(xs, px, inv_h);
      const double b1 = k::avx2::gaussian_sum_1d(xs, px, inv_h);
      CHECK(std::abs(a1 - b1) <= 1e-13 * std::max(a1, std::numeric_limits<double>::min()));
      const double a2 = k::scalar::gaussian_sum_2d(xs, ys, px, py, inv_h);
      const double b2 = k::avx2::gaussian_sum_2d(xs, ys, px, py, inv_h);
      CHECK(std::abs(a2 - b2) <= 1e-13 * std::max(a2, std::numeric_limits<double>::min()));
      CHECK(k::scalar::count_greater(xs, px) == k::avx2::count_greater(xs, px));
    }
  }
}

TEST_CASE("avx2 kernels handle underflow and special values") {
  if (!k::isa_available(k::Isa::Avx2)) return;
  const std::vector<double> far{1e3, -1e3, 50.0, 38.0, 37.0, 0.0};
  for (double inv_h : {1.0, 10.0}) {
    const double a = k::scalar::gaussian_sum_1d(far, 0.0, inv_h);
    const double b = k::avx2::gaussian_sum_1d(far, 0.0, inv_h);
    CHECK(std::abs(a - b) <= 1e-13 * a);
  }
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> v{inf, -inf, 1.0, 2.0, 2.0, 3.0, -1.0, 0.0, 2.0};
  for (double t : {-inf, 0.0, 2.0, 2.5, inf})
    CHECK(k::scalar::count_greater(v, t) == k::avx2::count_greater(v, t));
}

TEST_CASE("dispatch uses the active implementation") {
  Rng g(3, 0);
  const auto xs = normals(g, 333, 1.0);
  const double ref = k::active_isa() == k::Isa::Avx2 ? k::avx2::gaussian_sum_1d(xs, 0.3, 2.0)
                                                     : k::scalar::gaussian_sum_1d(xs, 0.3, 2.0);
  CHECK(k::gaussian_sum_1d(xs, 0.3, 2.0) == ref);
  CHECK(k::count_greater(xs, 0.0) == k::scalar::count_greater(xs, 0.0));
  CHECK(k::isa_available(k::Isa::Scalar));
  CHECK(k::to_string(k::Isa::Scalar) == "scalar");
}
