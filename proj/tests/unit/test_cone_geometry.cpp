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
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "anisotable/cone_geometry.hpp"
#include "anisotable/error.hpp"
#include "anisotable/rng.hpp"

using namespace anisotable;
using std::numbers::pi;

namespace {

Vec gaussian_point(Rng& g, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = standard_normal(g);
  return v;
}

// Distance from x to the ray {s u : s >= 0}.
double ray_distance(const Vec& x, const Vec& u) {
  const double s = std::max(0.0, dot(x, u));
  return norm(x - u * s);
}

// Independent d = 2 oracle: the complement of a circular cone about e2 is
// bounded by the two rays at angle +-psi from the axis.
double cone_distance_2d(const Vec& x, double psi) {
  const Vec r1{std::sin(psi), std::cos(psi)};
  const Vec r2{-std::sin(psi), std::cos(psi)};
  return std::min(ray_distance(x, r1), ray_distance(x, r2));
}

// Dense search over witnesses A in B(Q, 1): max of min(delta(A), 1 - |A - Q|).
double grid_kappa_at(const ConeDomain& d, const Vec& q, int k) {
  double best = 0.0;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) {
      const Vec a = q + Vec{-1.0 + 2.0 * i / k, -1.0 + 2.0 * j / k};
      const double dist = norm(a - q);
      if (dist >= 1.0) continue;
      best = std::max(best, std::min(d.boundary_distance(a), 1.0 - dist));
    }
  return best;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

std::vector<ConeDomain> sample_domains() {
  return {ConeDomain::half_space(Vec{0.0, 1.0}),
          ConeDomain::half_space(normalized(Vec{1.0, 2.0, -0.5})),
          ConeDomain::circular_cone(Vec{0.0, 1.0}, pi / 4),
          ConeDomain::circular_cone(Vec{0.0, 0.0, 1.0}, pi / 3),
          ConeDomain::circular_cone(Vec{0.0, 1.0}, 2.0),
          ConeDomain::complement_hyperplane(Vec{1.0, 0.0}),
          ConeDomain::half_space(Vec{1.0})};
}

}  // namespace

TEST_CASE("membership examples") {
  const ConeDomain h = ConeDomain::half_space(Vec{0.0, 0.0, 1.0});
  CHECK(h.contains(Vec{0.0, 0.0, 1.0}));
  CHECK_FALSE(h.contains(Vec{0.0, 0.0, -1.0}));
  CHECK_FALSE(h.contains(Vec{1.0, 0.0, 0.0}));
  for (double psi : {0.3, pi / 2, 2.5}) {
    const ConeDomain c = ConeDomain::circular_cone(Vec{0.0, 1.0}, psi);
    CHECK(c.contains(Vec{0.0, 1.0}));
    CHECK_FALSE(c.contains(Vec{0.0, -1.0}));
    CHECK_FALSE(c.contains(Vec{0.0, 0.0}));
  }
  CHECK(ConeDomain::full_space(2).contains(Vec{0.0, 0.0}));
  CHECK_FALSE(ConeDomain::complement_hyperplane(Vec{1.0, 0.0}).contains(Vec{0.0, 5.0}));
}

TEST_CASE("scale invariance, homogeneity and consistency") {
  Rng g(5, 0);
  for (const ConeDomain& d : sample_domains()) {
    for (int i = 0; i < 1000; ++i) {
      const Vec x = gaussian_point(g, d.dim());
      const double r = std::exp(6.0 * (g.uniform() - 0.5));
      CHECK(d.contains(x) == d.contains(x * r));
      CHECK(d.contains(x) == d.contains(x * 3.0));
      CHECK(d.boundary_distance(x * r) == doctest::Approx(r * d.boundary_distance(x)).epsilon(1e-12));
      CHECK(d.contains(x) == (d.boundary_distance(x) > 0.0));
      CHECK(d.reflected().contains(-x) == d.contains(x));
    }
    CHECK(d.contains(d.reference_direction()));
  }
}

TEST_CASE("boundary distance closed forms") {
  const ConeDomain h = ConeDomain::half_space(Vec{0.0, 1.0});
  CHECK(h.boundary_distance(Vec{3.0, 2.0}) == 2.0);
  CHECK(h.boundary_distance(Vec{3.0, -2.0}) == 0.0);
  CHECK(ConeDomain::complement_hyperplane(Vec{0.0, 1.0}).boundary_distance(Vec{3.0, -2.0}) == 2.0);
  CHECK(std::isinf(ConeDomain::full_space(2).boundary_distance(Vec{1.0, 1.0})));

  Rng g(6, 0);
  const ConeDomain right = ConeDomain::circular_cone(Vec{0.0, 1.0}, pi / 2);
  for (int i = 0; i < 1000; ++i) {
    const Vec x = gaussian_point(g, 2);
    CHECK(right.boundary_distance(x) == doctest::Approx(h.boundary_distance(x)).epsilon(1e-12));
    CHECK(right.contains(x) == h.contains(x));
  }
  for (double psi : {0.4, pi / 4, 1.2, 2.0, 2.8}) {
    const ConeDomain c = ConeDomain::circular_cone(Vec{0.0, 1.0}, psi);
    for (int i = 0; i < 500; ++i) {
      const Vec x = gaussian_point(g, 2);
      if (!c.contains(x)) continue;
      CHECK(c.boundary_distance(x) == doctest::Approx(cone_distance_2d(x, psi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("segment exit") {
  const ConeDomain h = ConeDomain::half_space(Vec{0.0, 1.0});
  const auto s = h.segment_exit(Vec{0.0, 1.0}, Vec{2.0, -1.0});
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(0.5));
  CHECK_FALSE(h.segment_exit(Vec{0.0, 1.0}, Vec{5.0, 0.5}).has_value());

  Rng g(7, 0);
  for (const ConeDomain& d : sample_domains()) {
    for (int i = 0; i < 300; ++i) {
      const Vec a = gaussian_point(g, d.dim());
      const Vec b = gaussian_point(g, d.dim());
      if (!d.contains(a)) continue;
      const auto e = d.segment_exit(a, b);
      // A fine scan of the segment must agree with the reported crossing. The
      // complement of a hyperplane is left at a single point, seen as a change of side.
      const bool plane = d.kind() == ConeDomain::Kind::ComplementHyperplane;
      double first = 2.0;
      for (int k = 1; k <= 4000; ++k) {
        const double t = k / 4000.0;
        const Vec p = a + (b - a) * t;
        if (!d.contains(p) || (plane && dot(p, d.axis()) * dot(a, d.axis()) < 0.0)) {
          first = t;
          break;
        }
      }
      if (e) {
        CHECK(*e > 0.0);
        CHECK(*e <= 1.0);
        CHECK(first >= *e - 1e-9);
        CHECK(first <= *e + 1.0 / 4000 + 1e-9);
      } else {
        CHECK(first == 2.0);
      }
    }
  }
}

TEST_CASE("fat witness validity") {
  Rng g(8, 0);
  for (const ConeDomain& d : sample_domains()) {
    const double kmax = kappa_estimate(d);
    for (double kappa : {0.1, 0.25, kmax * 0.999}) {
      for (int i = 0; i < 1000; ++i) {
        Vec q = gaussian_point(g, d.dim());
        // Half the points are pushed onto the boundary.
        if (i % 2 == 0) {
          for (int it = 0; it < 60 && d.contains(q); ++it) q = q - d.reference_direction() * (0.25 * norm(q) + 0.01);
          if (!d.contains(q)) {
            Vec in = d.reference_direction() * (norm(q) + 1.0);
            for (int it = 0; it < 80; ++it) {
              const Vec mid = (in + q) * 0.5;
              (d.contains(mid) ? in : q) = mid;
            }
          }
        } else if (!d.contains(q)) {
          continue;
        }
        const double r = std::exp(4.0 * (g.uniform() - 0.5));
        const Vec a = fat_witness(d, q, r, kappa);
        CHECK(d.boundary_distance(a) >= kappa * r * (1 - 1e-12));
        CHECK(norm(a - q) + kappa * r <= r * (1 + 1e-12));
      }
    }
  }
  CHECK(code_of([] { fat_witness(ConeDomain::half_space(Vec{0.0, 1.0}), Vec{0.0, 0.0}, 1.0, 0.6); }) ==
        ErrorCode::KappaTooLarge);
  const Vec q{0.3, -0.2};
  CHECK(fat_witness(ConeDomain::full_space(2), q, 1.0, 0.9) == q);
  const Vec a = fat_witness(ConeDomain::half_space(Vec{0.0, 1.0}), Vec{1.0, 0.0}, 2.0, 0.5);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(1.0));
}

TEST_CASE("fatness constants") {
  CHECK(kappa_estimate(ConeDomain::half_space(Vec{0.0, 1.0})) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(kappa_estimate(ConeDomain::half_space(Vec{1.0})) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(kappa_estimate(ConeDomain::circular_cone(Vec{0.0, 1.0}, pi / 2)) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(kappa_estimate(ConeDomain::full_space(3)) == 1.0);

  for (double psi : {pi / 4, pi / 6}) {
    const ConeDomain c = ConeDomain::circular_cone(Vec{0.0, 1.0}, psi);
    double oracle = grid_kappa_at(c, Vec{0.0, 0.0}, 600);
    for (double rho : {0.05, 0.5, 2.0}) oracle = std::min(oracle, grid_kappa_at(c, Vec{std::sin(psi), std::cos(psi)} * rho, 300));
    CHECK(std::abs(kappa_estimate(c) - oracle) < 1e-3);
  }
}

TEST_CASE("json round trip and validation") {
  for (const ConeDomain& d : sample_domains()) {
    const ConeDomain back = domain_from_json(to_json(d));
    CHECK(back.kind() == d.kind());
    CHECK(back.dim() == d.dim());
    CHECK(back.half_angle() == d.half_angle());
  }
  CHECK(domain_from_json({{"kind", "full"}, {"dim", 2}}).kind() == ConeDomain::Kind::FullSpace);
  CHECK(code_of([] { domain_from_json({{"kind", "halfspace"}, {"axis", {0.0, 1.0}}, {"extra", 1}}); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of([] { ConeDomain::circular_cone(Vec{0.0, 1.0}, 4.0); }) == ErrorCode::InvalidArgument);
}
