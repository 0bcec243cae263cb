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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "anisotable/vec.hpp"

namespace anisotable {

/// Node of a deterministic quadrature rule on the unit sphere S^{d-1}.
struct SphereNode {
  Vec direction;
  double weight = 0.0;
};

/// Fixed rules: the two points of S^0 (d=1), a 4096-point trapezoid rule on
/// the circle (d=2) and a 2562-node level-4 icosphere with spherical-area
/// weights (d=3). Weights sum to the surface area |S^{d-1}|.
std::span<const SphereNode> sphere_quadrature(int dim);

/// Density of the spherical measure with respect to surface measure.
class SphericalDensity {
 public:
  enum class Kind { Constant, Hemisphere, Tabulated };

  static SphericalDensity constant(int dim, double value);
  /// plus_weight on {w.axis >= 0} (the equator goes to the plus side),
  /// minus_weight on {w.axis < 0}.
  static SphericalDensity hemisphere(const Vec& axis, double plus_weight, double minus_weight);
  /// Piecewise constant on the Voronoi cells of `points` (nearest node wins).
  static SphericalDensity tabulated(std::vector<Vec> points, std::vector<double> values);

  double operator()(const Vec& w) const;

  /// The antipodal reflection w -> lambda(-w).
  SphericalDensity reflected() const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& axis() const { return axis_; }
  double plus_weight() const { return plus_; }
  double minus_weight() const { return minus_; }
  const std::vector<Vec>& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }

  /// Smallest and largest value the density can take.
  double min_value() const;
  double max_value() const;

 private:
  double tabulated_value(const Vec& w) const;

  Kind kind_ = Kind::Constant;
  int dim_ = 1;
  Vec axis_;
  double plus_ = 1.0;
  double minus_ = 1.0;
  std::vector<Vec> points_;
  std::vector<double> values_;
  // d = 2 tables: cell angles sorted ascending, with matching values.
  std::vector<double> sorted_angles_;
  std::vector<double> sorted_values_;
};

struct ModelSpec {
  double alpha = 1.0;
  int dim = 1;
  SphericalDensity density = SphericalDensity::constant(1, 1.0);
  double theta_low = 1.0;
  double theta_high = 1.0;
};

using Mat = std::array<std::array<double, kMaxDim>, kMaxDim>;

/// Validated parameters of a strictly alpha-stable Levy process whose
/// Levy density is nu(x) = lambda(x/|x|) |x|^{-d-alpha}.
///
/// Strict stability pins the drift, so it is never an input: for
/// alpha < 1 the process is the plain sum of its jumps, for alpha = 1 the
/// spherical mean has to vanish, and for alpha > 1 the jumps are fully
/// compensated. Construct through `validate`.
class StableModel {
 public:
  /// Relative tolerance on |spherical mean| / total mass at alpha = 1.
  static constexpr double kMeanTolerance = 1e-6;

  static StableModel validate(const ModelSpec& spec);

  double alpha() const { return spec_.alpha; }
  int dim() const { return spec_.dim; }
  const SphericalDensity& density() const { return spec_.density; }
  double theta_low() const { return spec_.theta_low; }
  double theta_high() const { return spec_.theta_high; }
  const ModelSpec& spec() const { return spec_; }

  /// zeta(S^{d-1}) = integral of lambda over the sphere.
  double total_mass() const { return total_mass_; }
  /// Integral of w lambda(w) over the sphere.
  const Vec& spherical_mean() const { return mean_; }
  /// Integral of w w^T lambda(w) over the sphere.
  const Mat& spherical_second_moment() const { return second_moment_; }
  /// Whether lambda(w) == lambda(-w) at every quadrature node.
  bool symmetric() const { return symmetric_; }

  /// nu(complement of B_eps) = total_mass * eps^{-alpha} / alpha.
  double big_jump_rate(double eps) const;
  /// Integral of z nu(dz) over {|z| < eps} (alpha < 1 only; finite there).
  Vec small_jump_mean(double eps) const;
  /// Integral of z nu(dz) over {|z| >= eps} (alpha > 1 only).
  Vec big_jump_mean(double eps) const;
  /// Integral of z z^T nu(dz) over {|z| < eps}.
  Mat small_jump_covariance(double eps) const;

 private:
  explicit StableModel(ModelSpec spec) : spec_(std::move(spec)) {}

  ModelSpec spec_;
  double total_mass_ = 0.0;
  Vec mean_;
  Mat second_moment_{};
  bool symmetric_ = false;
};

/// Levy density nu(x) = lambda(x/|x|) |x|^{-d-alpha}. Throws OriginEvaluation at x = 0.
double levy_density(const StableModel& model, const Vec& x);

/// Pruitt's function h(r) = h(1) r^{-alpha}; h(1) combines the truncated
/// second moment, the tail mass and the regime-pinned drift term.
double pruitt_h(const StableModel& model, double r);

/// Jump intensities of the projection Y = <X, direction>, whose Levy
/// density is c_minus |z|^{-1-alpha} on z < 0 and c_plus |z|^{-1-alpha} on z > 0.
struct ProjectionCoeffs {
  Vec direction;
  double c_minus = 0.0;
  double c_plus = 0.0;
};

ProjectionCoeffs projection_coefficients(const StableModel& model, const Vec& direction);

/// rho = P(Y_1 > 0) by Zolotarev's formula. Throws AlphaEqualsOne at alpha = 1.
double positivity_parameter(const ProjectionCoeffs& coeffs, double alpha);

/// Homogeneity orders of the Martin kernels of a half-space for the
/// process (beta) and for its dual (beta_hat).
///
/// The process survives in {x . n > 0} while Y = <X, n> stays positive,
/// so beta = alpha P(Y_1 < 0) = alpha (1 - rho) and beta_hat = alpha rho,
/// with rho = P(Y_1 > 0). The survival regressions in the estimators
/// confirm this polarity.
struct HalfspaceExponents {
  double rho = 0.5;
  double beta = 0.0;
  double beta_hat = 0.0;
};

/// At alpha = 1 only symmetric models are handled (rho = 1/2); other
/// models throw AlphaEqualsOne and need the Monte Carlo sign frequency.
HalfspaceExponents halfspace_exponents(const StableModel& model, const Vec& inward_normal);

/// Model of the dual process -X: lambda_hat(w) = lambda(-w).
StableModel dual(const StableModel& model);

// JSON model specification:
//   {"alpha": 1.5, "dim": 2, "theta_low": 0.5, "theta_high": 2,
//    "density": {"kind": "constant", "value": 1}
//             | {"kind": "hemisphere", "axis": [0, 1], "plus_weight": 2, "minus_weight": 1}
//             | {"kind": "tabulated", "points": [[1, 0], ...], "values": [1.2, ...]}}
ModelSpec model_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& spec);
StableModel model_from_json(const nlohmann::json& j);

/// Stable 64-bit fingerprint of the model specification.
std::uint64_t model_hash(const StableModel& model);

}  // namespace anisotable
