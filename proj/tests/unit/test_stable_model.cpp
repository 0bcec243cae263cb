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
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "anisotable/error.hpp"
#include "anisotable/rng.hpp"
#include "anisotable/stable_model.hpp"

using namespace anisotable;
using std::numbers::pi;

namespace {

StableModel make(double alpha, int dim, SphericalDensity density, double lo, double hi) {
  ModelSpec s;
  s.alpha = alpha;
  s.dim = dim;
  s.density = std::move(density);
  s.theta_low = lo;
  s.theta_high = hi;
  return StableModel::validate(s);
}

StableModel iso(double alpha, int dim) { return make(alpha, dim, SphericalDensity::constant(dim, 1.0), 1.0, 1.0); }

StableModel weights_1d(double alpha, double plus, double minus) {
  return make(alpha, 1, SphericalDensity::hemisphere(Vec{1.0}, plus, minus), std::min(plus, minus),
              std::max(plus, minus));
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

// lambda(w) = 1 + 0.3 (w1^2 - w2^2), tabulated on `k` cells rotated by `phi`.
SphericalDensity quadrupole(int k, double phi) {
  std::vector<Vec> pts;
  std::vector<double> vals;
  for (int i = 0; i < k; ++i) {
    const double a = 2.0 * pi * (i + 0.5) / k;
    pts.push_back(Vec{std::cos(a + phi), std::sin(a + phi)});
    vals.push_back(1.0 + 0.3 * std::cos(2.0 * a));
  }
  return SphericalDensity::tabulated(pts, vals);
}

Vec rotate(const Vec& v, double phi) {
  return Vec{std::cos(phi) * v[0] - std::sin(phi) * v[1], std::sin(phi) * v[0] + std::cos(phi) * v[1]};
}

}  // namespace

TEST_CASE("quadrature weights integrate the constant to the sphere area") {
  const double area[] = {2.0, 2.0 * pi, 4.0 * pi};
  for (int d = 1; d <= 3; ++d) {
    double s = 0.0;
    for (const auto& node : sphere_quadrature(d)) {
      s += node.weight;
      CHECK(std::abs(norm(node.direction) - 1.0) < 1e-12);
    }
    CHECK(s == doctest::Approx(area[d - 1]).epsilon(1e-12));
  }
}

TEST_CASE("validation rejects bad parameters") {
  CHECK(code_of([] { iso(0.0, 2); }) == ErrorCode::AlphaOutOfRange);
  CHECK(code_of([] { iso(2.0, 2); }) == ErrorCode::AlphaOutOfRange);
  CHECK(code_of([] { iso(-0.5, 1); }) == ErrorCode::AlphaOutOfRange);
  CHECK(code_of([] { weights_1d(1.0, 2.0, 1.0); }) == ErrorCode::AlphaOneAsymmetric);
  CHECK(code_of([] { make(1.5, 2, SphericalDensity::constant(2, 3.0), 0.5, 2.0); }) ==
        ErrorCode::ThetaBoundViolated);
  CHECK(code_of([] { make(1.5, 2, SphericalDensity::constant(2, 1.0), 0.0, 2.0); }) ==
        ErrorCode::ThetaBoundViolated);
  CHECK(code_of([] { iso(1.5, 4); }) == ErrorCode::UnsupportedDimension);
}

TEST_CASE("isotropic and even tabulated models have zero spherical mean") {
  const StableModel m = iso(0.8, 2);
  CHECK(norm(m.spherical_mean()) < 1e-12);
  CHECK(m.symmetric());
  const StableModel t = make(1.0, 2, quadrupole(720, 0.0), 0.7, 1.3);
  CHECK(norm(t.spherical_mean()) <= StableModel::kMeanTolerance * t.total_mass());
}

TEST_CASE("hemisphere density takes the plus weight on the equator") {
  const auto h = SphericalDensity::hemisphere(Vec{0.0, 1.0}, 2.0, 1.0);
  CHECK(h(Vec{0.0, 1.0}) == 2.0);
  CHECK(h(Vec{0.0, -1.0}) == 1.0);
  CHECK(h(Vec{1.0, 0.0}) == 2.0);
  CHECK(h.min_value() == 1.0);
  CHECK(h.max_value() == 2.0);
}

TEST_CASE("levy density values, homogeneity and bounds") {
  CHECK(levy_density(iso(1.0, 2), Vec{2.0, 0.0}) == doctest::Approx(0.125).epsilon(1e-15));
  const StableModel h = make(1.5, 2, SphericalDensity::hemisphere(Vec{0.0, 1.0}, 2.0, 1.0), 1.0, 2.0);
  CHECK(levy_density(h, Vec{0.0, -1.0}) == 1.0);
  CHECK(code_of([&] { levy_density(h, Vec{0.0, 0.0}); }) == ErrorCode::OriginEvaluation);

  Rng g(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const Vec x{standard_normal(g), standard_normal(g)};
    const double r = std::exp(4.0 * (g.uniform() - 0.5));
    const double nx = levy_density(h, x);
    const double scale = std::pow(r, -2.0 - 1.5);
    CHECK(levy_density(h, x * r) == doctest::Approx(scale * nx).epsilon(1e-13));
    const double envelope = std::pow(norm(x), -2.0 - 1.5);
    CHECK(nx >= h.theta_low() * envelope * (1 - 1e-14));
    CHECK(nx <= h.theta_high() * envelope * (1 + 1e-14));
  }
}

TEST_CASE("pruitt h is an exact power law") {
  // d = 1, lambda = 1: h(1) = 2 / alpha + 2 / (2 - alpha), drift term 0 by symmetry.
  CHECK(pruitt_h(iso(1.0, 1), 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(pruitt_h(iso(0.5, 1), 1.0) == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  for (const StableModel& m : {iso(0.5, 2), iso(1.5, 3), weights_1d(0.8, 2.0, 1.0), weights_1d(1.7, 1.0, 3.0)}) {
    const double ref = pruitt_h(m, 1.0);
    CHECK(ref > 0.0);
    for (int k = -10; k <= 10; ++k) {
      const double r = std::ldexp(1.0, k);
      CHECK(pruitt_h(m, r) * std::pow(r, m.alpha()) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("projection coefficients") {
  const ProjectionCoeffs w = projection_coefficients(weights_1d(0.8, 2.0, 1.0), Vec{1.0});
  CHECK(w.c_minus == doctest::Approx(1.0));
  CHECK(w.c_plus == doctest::Approx(2.0));

  // Isotropic d = 2: c = integral of cos^alpha over (-pi/2, pi/2)
  // = sqrt(pi) Gamma((alpha + 1) / 2) / Gamma(alpha / 2 + 1).
  for (double a : {0.5, 1.0, 1.5}) {
    const ProjectionCoeffs c = projection_coefficients(iso(a, 2), Vec{0.0, 1.0});
    const double ref = std::sqrt(pi) * std::tgamma((a + 1.0) / 2.0) / std::tgamma(a / 2.0 + 1.0);
    CHECK(c.c_plus == doctest::Approx(ref).epsilon(1e-4));
    CHECK(c.c_minus == doctest::Approx(c.c_plus).epsilon(1e-12));
  }
  CHECK(projection_coefficients(iso(1.0, 2), Vec{0.0, 1.0}).c_plus == doctest::Approx(2.0).epsilon(1e-5));

  // Rotating density and direction together.
  const double phi = 0.37;
  const StableModel m0 = make(1.3, 2, quadrupole(360, 0.0), 0.7, 1.3);
  const StableModel m1 = make(1.3, 2, quadrupole(360, phi), 0.7, 1.3);
  for (const Vec& u : {Vec{1.0, 0.0}, Vec{0.0, 1.0}, normalized(Vec{1.0, 2.0})}) {
    const ProjectionCoeffs a = projection_coefficients(m0, u);
    const ProjectionCoeffs b = projection_coefficients(m1, rotate(u, phi));
    CHECK(b.c_plus == doctest::Approx(a.c_plus).epsilon(1e-3));
    CHECK(b.c_minus == doctest::Approx(a.c_minus).epsilon(1e-3));
    CHECK(a.c_plus > 0.0);
    CHECK(a.c_minus > 0.0);
  }
}

TEST_CASE("positivity parameter") {
  for (double a : {0.3, 0.8, 1.2, 1.9}) CHECK(positivity_parameter({Vec{1.0}, 2.5, 2.5}, a) == 0.5);
  CHECK(code_of([] { positivity_parameter({Vec{1.0}, 1.0, 2.0}, 1.0); }) == ErrorCode::AlphaEqualsOne);

  // rho grows with c_+ / c_- below alpha = 1 and shrinks above it, where the
  // compensating drift points against the heavier tail.
  for (double a : {0.5, 0.8, 1.2, 1.5, 1.8}) {
    double prev = a < 1.0 ? 0.0 : 1.0;
    for (double ratio = 0.05; ratio <= 20.0; ratio *= 1.3) {
      const double rho = positivity_parameter({Vec{1.0}, 1.0, ratio}, a);
      CHECK((a < 1.0 ? rho > prev : rho < prev));
      prev = rho;
      if (a > 1.0) {
        CHECK(rho > 1.0 - 1.0 / a);
        CHECK(rho < 1.0 / a);
      } else {
        CHECK(rho > 0.0);
        CHECK(rho < 1.0);
      }
    }
  }

  // Sign frequencies of the exact one-dimensional sampler, n = 10^6.
  struct Frozen {
    double alpha, c_minus, c_plus, mc, se;
  };
  for (const Frozen& f : {Frozen{0.8, 1.0, 2.0, 0.817788, 0.000386}, Frozen{0.5, 1.0, 3.0, 0.795610, 0.000403},
                          Frozen{1.5, 1.0, 2.0, 0.430888, 0.000495}}) {
    const double rho = positivity_parameter({Vec{1.0}, f.c_minus, f.c_plus}, f.alpha);
    CHECK(std::abs(rho - f.mc) <= 3.0 * f.se);
  }
}

TEST_CASE("half-space exponents and duality") {
  const HalfspaceExponents s = halfspace_exponents(iso(1.0, 2), Vec{0.0, 1.0});
  CHECK(s.rho == 0.5);
  CHECK(s.beta == 0.5);
  CHECK(s.beta_hat == 0.5);

  const StableModel sym = make(1.5, 2, quadrupole(360, 0.0), 0.7, 1.3);
  const HalfspaceExponents e = halfspace_exponents(sym, Vec{0.0, 1.0});
  // Voronoi cells and quadrature nodes only agree up to the node spacing.
  CHECK(e.beta == doctest::Approx(0.75).epsilon(1e-5));
  CHECK(e.beta_hat == doctest::Approx(0.75).epsilon(1e-5));

  for (double a : {0.5, 0.8, 1.5}) {
    const StableModel m = weights_1d(a, 2.0, 1.0);
    const HalfspaceExponents x = halfspace_exponents(m, Vec{1.0});
    const HalfspaceExponents y = halfspace_exponents(dual(m), Vec{1.0});
    CHECK(x.beta + x.beta_hat == doctest::Approx(a).epsilon(1e-14));
    CHECK(x.beta == doctest::Approx(y.beta_hat).epsilon(1e-14));
    CHECK(x.beta_hat == doctest::Approx(y.beta).epsilon(1e-14));
    CHECK(x.beta > 0.0);
    CHECK(x.beta < a);
  }
}

TEST_CASE("dual model") {
  const StableModel m = make(1.5, 2, SphericalDensity::hemisphere(Vec{0.0, 1.0}, 2.0, 1.0), 1.0, 2.0);
  const StableModel h = dual(m);
  CHECK(h.density()(Vec{0.0, 1.0}) == 1.0);
  CHECK(h.density()(Vec{0.0, -1.0}) == 2.0);
  for (int i = 0; i < 2; ++i) CHECK(h.spherical_mean()[i] == doctest::Approx(-m.spherical_mean()[i]).epsilon(1e-12));
  const StableModel hh = dual(h);
  for (const auto& node : sphere_quadrature(2)) CHECK(hh.density()(node.direction) == m.density()(node.direction));
  const StableModel c = iso(0.7, 3);
  CHECK(model_hash(dual(c)) == model_hash(c));
}

TEST_CASE("json round trip and hashing") {
  const nlohmann::json j = {{"alpha", 1.5},
                            {"dim", 2},
                            {"density", {{"kind", "hemisphere"}, {"axis", {0.0, 1.0}}, {"plus_weight", 2.0},
                                         {"minus_weight", 1.0}}},
                            {"theta_low", 1.0},
                            {"theta_high", 2.0}};
  const StableModel m = model_from_json(j);
  const StableModel back = model_from_json(to_json(m.spec()));
  CHECK(model_hash(m) == model_hash(back));
  CHECK(model_hash(m) != model_hash(dual(m)));
  nlohmann::json bad = j;
  bad["density"]["shape"] = 1;
  CHECK(code_of([&] { model_from_json(bad); }) == ErrorCode::ConfigInvalid);
}
