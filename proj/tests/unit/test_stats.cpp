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

#include <algorithm>
#include <cmath>
#include <vector>

#include "anisotable/error.hpp"
#include "anisotable/rng.hpp"
#include "anisotable/stats.hpp"

using namespace anisotable;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

// Reference values from scipy.special.kolmogorov and scipy.stats.chi2.sf.
TEST_CASE("kolmogorov survival function") {
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
  CHECK(kolmogorov_q(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-10));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(10.0) < 1e-80);
}

TEST_CASE("chi-square upper tail") {
  CHECK(chi_square_sf(7.3, 4) == doctest::Approx(0.12085874882121235).epsilon(1e-12));
  CHECK(chi_square_sf(30.0, 17) == doctest::Approx(0.026345078283536126).epsilon(1e-12));
  CHECK(chi_square_sf(0.2, 0.5) == doctest::Approx(0.391661154271034).epsilon(1e-12));
  for (double x : {0.1, 1.0, 5.0, 20.0}) {
    CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-13));
    CHECK(chi_square_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2))).epsilon(1e-12));
  }
  const std::vector<std::size_t> counts{25, 25, 50};
  const std::vector<double> probs{0.25, 0.25, 0.5};
  CHECK(chi_square_gof(counts, probs) == doctest::Approx(1.0));
  const std::vector<std::size_t> skew{40, 10, 50};
  // X^2 = 15^2/25 + 15^2/25 = 18 on 2 dof.
  CHECK(chi_square_gof(skew, probs) == doctest::Approx(std::exp(-9.0)).epsilon(1e-12));
}

TEST_CASE("two-sample KS statistic") {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{2.5, 5, 6};
  const KsResult r = ks_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(2.0 / 3.0));
  const double ne = std::sqrt(12.0 / 7.0);
  CHECK(r.p_value == doctest::Approx(kolmogorov_q((ne + 0.12 + 0.11 / ne) * 2.0 / 3.0)));

  const std::vector<double> t1{1, 1, 2};
  const std::vector<double> t2{1, 2, 2};
  CHECK(ks_two_sample(t1, t2).statistic == doctest::Approx(1.0 / 3.0));
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  const std::vector<double> far{10, 11};
  CHECK(ks_two_sample(a, far).statistic == 1.0);
}

TEST_CASE("KS p-values are calibrated under the null") {
  Rng g(9, 0);
  constexpr int kReps = 400;
  int below = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    std::vector<double> x(500), y(700);
    for (double& v : x) v = standard_normal(g);
    for (double& v : y) v = standard_normal(g);
    below += ks_two_sample(x, y).p_value < 0.1 ? 1 : 0;
  }
  // Binomial(400, 0.1): mean 40, sd 6.
  CHECK(below > 40 - 4 * 6);
  CHECK(below < 40 + 4 * 6);
}

TEST_CASE("weighted least squares") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const std::vector<double> w{1, 2, 3, 4};
  const LinearFit f = weighted_least_squares(x, y, w);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));

  // Zero weight removes the outlier.
  const std::vector<double> y2{1, 3, 5, 100};
  const std::vector<double> w2{1, 1, 1, 0};
  CHECK(weighted_least_squares(x, y2, w2).slope == doctest::Approx(2.0));

  const std::vector<double> same{2, 2, 2};
  const std::vector<double> ones{1, 1, 1};
  CHECK(code_of([&] { weighted_least_squares(same, ones, ones); }) == ErrorCode::DegenerateGrid);
  const std::vector<double> zeros{0, 0, 0};
  CHECK(code_of([&] { weighted_least_squares(std::span(x).first(3), ones, zeros); }) == ErrorCode::DegenerateGrid);
}

TEST_CASE("bin merging") {
  const std::vector<double> pooled{6, 2, 2, 3, 7, 1, 1};
  // Groups: {6}, {2,2,3}, {7}, tail {1,1} folded into {7}.
  CHECK(merge_groups(pooled, 5.0) == std::vector<std::size_t>{0, 1, 1, 1, 2, 2, 2});
  const std::vector<double> tiny{1, 1};
  CHECK(merge_groups(tiny, 5.0) == std::vector<std::size_t>{0, 0});
  const std::vector<double> big{10, 10, 10};
  CHECK(merge_groups(big, 5.0) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("total variation") {
  const std::vector<double> a{100, 100, 0, 0};
  const std::vector<double> b{0, 0, 100, 100};
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));
  CHECK(tv_distance(a, a) == 0.0);
  const std::vector<double> c{300, 100};
  const std::vector<double> d{100, 300};
  CHECK(tv_distance(c, d) == doctest::Approx(0.5));
  // Scale of the counts does not matter once no bin is merged.
  const std::vector<double> c2{3000, 1000};
  CHECK(tv_distance(c2, d) == doctest::Approx(0.5));

  const std::vector<double> probs{0.5, 0.5};
  CHECK(tv_to_reference(c, probs) == doctest::Approx(0.25));
  // Every expected count below 5: one group, TV 0.
  const std::vector<double> few{3, 0};
  CHECK(tv_to_reference(few, probs) == 0.0);
  const std::vector<double> empty{0, 0};
  CHECK(code_of([&] { tv_distance(empty, c); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("quantiles, moments and bandwidth") {
  const std::vector<double> s{1, 2, 3, 4, 5};
  CHECK(quantile_sorted(s, 0.0) == 1.0);
  CHECK(quantile_sorted(s, 1.0) == 5.0);
  CHECK(quantile_sorted(s, 0.5) == 3.0);
  CHECK(quantile_sorted(s, 0.125) == doctest::Approx(1.5));
  CHECK(mean(s) == 3.0);
  CHECK(sample_sd(s) == doctest::Approx(std::sqrt(2.5)));

  Rng g(10, 0);
  std::vector<double> z(100000);
  for (double& v : z) v = standard_normal(g);
  // Standard normal: sd = 1 and IQR / 1.34 = 1.0066, so the rule gives 0.9 n^{-1/5}.
  CHECK(silverman_bandwidth(z) == doctest::Approx(0.9 * std::pow(1e5, -0.2)).epsilon(0.02));
}
