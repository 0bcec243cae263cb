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

#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "anisotable/vec.hpp"

namespace anisotable {

/// Scale-invariant open set with vertex at the origin.
///
/// Boundary points are outside (every variant is open), matching the exit
/// time from an open set. In d = 1 every circular cone is the half-line
/// {x . axis > 0}.
class ConeDomain {
 public:
  enum class Kind { FullSpace, HalfSpace, CircularCone, ComplementHyperplane };

  static ConeDomain full_space(int dim);
  static ConeDomain half_space(const Vec& inward_normal);
  /// {x : angle(x, axis) < half_angle}, half_angle in (0, pi).
  static ConeDomain circular_cone(const Vec& axis, double half_angle);
  /// R^d minus the hyperplane {x . normal = 0}.
  static ConeDomain complement_hyperplane(const Vec& normal);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& axis() const { return axis_; }
  double half_angle() const { return half_angle_; }

  bool contains(const Vec& x) const;
  /// delta(x) = dist(x, complement); +infinity for the full space.
  double boundary_distance(const Vec& x) const;
  /// Convex domains contain a segment as soon as they contain its endpoints.
  bool convex() const;
  /// First parameter s in (0, 1] at which a + s (b - a) leaves the domain,
  /// given a inside. nullopt when the whole segment stays inside.
  std::optional<double> segment_exit(const Vec& a, const Vec& b) const;
  /// Point of the reference ray kept inside the cone (the axis, or the
  /// inward normal).
  Vec reference_direction() const;
  /// The reflected set -Gamma.
  ConeDomain reflected() const;

 private:
  Kind kind_ = Kind::FullSpace;
  int dim_ = 1;
  Vec axis_;
  double half_angle_ = 0.0;
  double cos_half_angle_ = 0.0;
};

/// delta(x) for the domain; alias kept for call sites that read better.
inline double boundary_distance(const ConeDomain& domain, const Vec& x) {
  return domain.boundary_distance(x);
}
inline bool contains(const ConeDomain& domain, const Vec& x) { return domain.contains(x); }

/// A point A with B(A, kappa r) inside D and inside B(Q, r), for Q in the
/// closure of D. Throws KappaTooLarge when kappa exceeds the fatness
/// constant of the domain.
Vec fat_witness(const ConeDomain& domain, const Vec& q, double r, double kappa);

/// Supremum of the admissible kappa: the worst case over boundary points
/// of max_A min(delta(A), r - |A - Q|) / r, found by a polar scan with
/// golden-section refinement. The full space returns 1.
double kappa_estimate(const ConeDomain& domain);

// {"kind": "halfspace"|"cone"|"complement_hyperplane"|"full", "axis": [...],
//  "half_angle": float}. "full" needs "dim" when no axis is given.
ConeDomain domain_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConeDomain& domain);

}  // namespace anisotable
