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

#include "anisotable/cone_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "anisotable/error.hpp"

namespace anisotable {
namespace {

using std::numbers::pi;

Vec unit_or_fail(const Vec& v, const char* what) {
  if (v.dim() < 1 || v.dim() > kMaxDim) fail(ErrorCode::UnsupportedDimension, "dimension must be 1, 2 or 3");
  const double n = norm(v);
  if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, std::string(what) + " must be nonzero");
  return v * (1.0 / n);
}

// Unit vector orthogonal to `a` (d >= 2).
Vec orthogonal_to(const Vec& a) {
  const int d = a.dim();
  Vec best(d);
  double best_norm = -1.0;
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::unit(d, i);
    Vec p = e - a * dot(e, a);
    if (norm(p) > best_norm) {
      best_norm = norm(p);
      best = p;
    }
  }
  return normalized(best);
}

}  // namespace

ConeDomain ConeDomain::full_space(int dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorCode::UnsupportedDimension, "dimension must be 1, 2 or 3");
  ConeDomain c;
  c.kind_ = Kind::FullSpace;
  c.dim_ = dim;
  c.axis_ = Vec::unit(dim, dim - 1);
  return c;
}

ConeDomain ConeDomain::half_space(const Vec& inward_normal) {
  ConeDomain c;
  c.kind_ = Kind::HalfSpace;
  c.axis_ = unit_or_fail(inward_normal, "half-space normal");
  c.dim_ = inward_normal.dim();
  c.half_angle_ = pi / 2;
  return c;
}

ConeDomain ConeDomain::circular_cone(const Vec& axis, double half_angle) {
  if (!(half_angle > 0.0 && half_angle < pi))
    fail(ErrorCode::InvalidArgument, "cone half-angle must lie in (0, pi)");
  ConeDomain c;
  c.kind_ = Kind::CircularCone;
  c.axis_ = unit_or_fail(axis, "cone axis");
  c.dim_ = axis.dim();
  c.half_angle_ = half_angle;
  c.cos_half_angle_ = std::cos(half_angle);
  return c;
}

ConeDomain ConeDomain::complement_hyperplane(const Vec& normal) {
  ConeDomain c;
  c.kind_ = Kind::ComplementHyperplane;
  c.axis_ = unit_or_fail(normal, "hyperplane normal");
  c.dim_ = normal.dim();
  return c;
}

bool ConeDomain::contains(const Vec& x) const {
  switch (kind_) {
    case Kind::FullSpace: return true;
    case Kind::HalfSpace: return dot(x, axis_) > 0.0;
    case Kind::ComplementHyperplane: return dot(x, axis_) != 0.0;
    case Kind::CircularCone:
      if (dim_ == 1) return dot(x, axis_) > 0.0;
      return dot(x, axis_) > norm(x) * cos_half_angle_ && dot(x, x) > 0.0;
  }
  return false;
}

double ConeDomain::boundary_distance(const Vec& x) const {
  switch (kind_) {
    case Kind::FullSpace: return std::numeric_limits<double>::infinity();
    case Kind::HalfSpace: return std::max(dot(x, axis_), 0.0);
    case Kind::ComplementHyperplane: return std::abs(dot(x, axis_));
    case Kind::CircularCone: {
      if (dim_ == 1) return std::max(dot(x, axis_), 0.0);
      if (!contains(x)) return 0.0;
      const double r = norm(x);
      const double phi = std::acos(std::clamp(dot(x, axis_) / r, -1.0, 1.0));
      // Beyond a right angle the nearest point of the complement is the vertex.
      return r * std::sin(std::min(half_angle_ - phi, pi / 2));
    }
  }
  return 0.0;
}

bool ConeDomain::convex() const {
  switch (kind_) {
    case Kind::FullSpace:
    case Kind::HalfSpace: return true;
    case Kind::ComplementHyperplane: return false;
    case Kind::CircularCone: return dim_ == 1 || half_angle_ <= pi / 2;
  }
  return true;
}

std::optional<double> ConeDomain::segment_exit(const Vec& a, const Vec& b) const {
  switch (kind_) {
    case Kind::FullSpace: return std::nullopt;
    case Kind::HalfSpace: {
      if (contains(b)) return std::nullopt;
      const double ha = dot(a, axis_);
      const double hb = dot(b, axis_);
      return std::clamp(ha / (ha - hb), 0.0, 1.0);
    }
    case Kind::ComplementHyperplane: {
      const double ha = dot(a, axis_);
      const double hb = dot(b, axis_);
      if (hb != 0.0 && (ha > 0.0) == (hb > 0.0)) return std::nullopt;
      return std::clamp(ha / (ha - hb), 0.0, 1.0);
    }
    case Kind::CircularCone: {
      if (dim_ == 1) {
        if (contains(b)) return std::nullopt;
        const double ha = dot(a, axis_);
        const double hb = dot(b, axis_);
        return std::clamp(ha / (ha - hb), 0.0, 1.0);
      }
      if (convex() && contains(b)) return std::nullopt;
      // Zeros of g(s) = x(s).axis - cos(psi) |x(s)| lie among the roots of
      // q(s) = (x.axis)^2 - cos^2(psi) |x|^2 with x.axis of the sign of cos(psi).
      const Vec v = b - a;
      const double c = cos_half_angle_;
      const double pa = dot(a, axis_);
      const double pv = dot(v, axis_);
      const double qa = pa * pa - c * c * dot(a, a);
      const double qb = 2.0 * (pa * pv - c * c * dot(a, v));
      const double qc = pv * pv - c * c * dot(v, v);
      std::array<double, 2> roots{};
      int count = 0;
      if (std::abs(qc) < 1e-300) {
        if (qb != 0.0) roots[count++] = -qa / qb;
      } else {
        const double disc = qb * qb - 4.0 * qc * qa;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          // Numerically stable pair.
          const double t = -0.5 * (qb + std::copysign(sq, qb));
          if (t != 0.0) {
            roots[count++] = t / qc;
            roots[count++] = qa / t;
          } else {
            roots[count++] = 0.0;
          }
        }
      }
      std::sort(roots.begin(), roots.begin() + count);
      for (int i = 0; i < count; ++i) {
        const double s = roots[i];
        if (!(s > 0.0 && s <= 1.0)) continue;
        const Vec x = a + v * s;
        if (dot(x, axis_) * c >= 0.0 || norm(x) == 0.0) return s;
      }
      if (!contains(b)) return 1.0;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Vec ConeDomain::reference_direction() const { return axis_; }

ConeDomain ConeDomain::reflected() const {
  ConeDomain c = *this;
  c.axis_ = -axis_;
  return c;
}

// ---------------------------------------------------------------------------
// Fatness

namespace {

double witness_score(const ConeDomain& domain, const Vec& q, double r, const Vec& a) {
  const double inner = r - norm(a - q);
  const double delta = domain.boundary_distance(a);
  return std::min(delta, inner) / r;
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iterations = 60) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

// Grid scan followed by golden refinement around the best grid cell.
template <class F>
double scan_max(F&& f, double lo, double hi, int cells) {
  const double h = (hi - lo) / cells;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= cells; ++i) {
    const double v = f(lo + h * i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = std::max(lo, lo + h * (best - 1));
  const double b = std::min(hi, lo + h * (best + 1));
  const double x = golden_max(f, a, b);
  return f(x) >= best_val ? x : lo + h * best;
}

// Best witness for (q, r). The optimum lies in the plane spanned by the
// reference direction and q (rotational symmetry about the axis), so the
// search runs over rays A = q + rho u, u in that plane: an outer scan over
// the ray angle and an inner scan over rho in [0, r].
Vec best_witness(const ConeDomain& domain, const Vec& q, double r) {
  const int d = domain.dim();
  const Vec e1 = domain.reference_direction();
  if (d == 1) {
    Vec best = q;
    double best_score = witness_score(domain, q, r, q);
    for (double sign : {1.0, -1.0}) {
      auto along = [&](double rho) { return witness_score(domain, q, r, q + e1 * (sign * rho)); };
      const double rho = scan_max(along, 0.0, r, 64);
      if (along(rho) > best_score) {
        best_score = along(rho);
        best = q + e1 * (sign * rho);
      }
    }
    return best;
  }
  Vec e2 = q - e1 * dot(q, e1);
  e2 = norm(e2) > 1e-12 * std::max(1.0, norm(q)) ? normalized(e2) : orthogonal_to(e1);
  auto ray = [&](double t) { return e1 * std::cos(t) + e2 * std::sin(t); };
  auto best_rho = [&](double t) {
    const Vec u = ray(t);
    return scan_max([&](double rho) { return witness_score(domain, q, r, q + u * rho); }, 0.0, r, 32);
  };
  auto angle_score = [&](double t) {
    return witness_score(domain, q, r, q + ray(t) * best_rho(t));
  };
  const double t = scan_max(angle_score, -pi, pi, 360);
  const Vec a = q + ray(t) * best_rho(t);
  return witness_score(domain, q, r, a) >= witness_score(domain, q, r, q) ? a : q;
}

// Closed-form fatness constants; kappa_estimate recovers them numerically.
double analytic_kappa(const ConeDomain& domain) {
  switch (domain.kind()) {
    case ConeDomain::Kind::FullSpace: return 1.0;
    case ConeDomain::Kind::CircularCone:
      if (domain.dim() >= 2 && domain.half_angle() < pi / 2) {
        // Worst case at the vertex: ball on the axis touching both the
        // lateral surface and the sphere of radius r.
        const double s = std::sin(domain.half_angle());
        return s / (1.0 + s);
      }
      return 0.5;
    default: return 0.5;
  }
}

}  // namespace

double kappa_estimate(const ConeDomain& domain) {
  if (domain.kind() == ConeDomain::Kind::FullSpace) return 1.0;
  const int d = domain.dim();
  const double r = 1.0;
  std::vector<Vec> boundary_points;
  if (d == 1 || domain.kind() != ConeDomain::Kind::CircularCone) {
    // Boundary is a hyperplane through the origin; every point looks alike.
    boundary_points.push_back(Vec(d));
  } else {
    const Vec a = domain.axis();
    const Vec p = orthogonal_to(a);
    const Vec ray = a * std::cos(domain.half_angle()) + p * std::sin(domain.half_angle());
    boundary_points.push_back(Vec(d));
    for (double rho = 1e-3; rho <= 1e3; rho *= std::sqrt(2.0)) boundary_points.push_back(ray * rho);
  }
  double kappa = 1.0;
  for (const Vec& q : boundary_points)
    kappa = std::min(kappa, witness_score(domain, q, r, best_witness(domain, q, r)));
  return kappa;
}

Vec fat_witness(const ConeDomain& domain, const Vec& q, double r, double kappa) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "fat_witness needs r > 0");
  if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorCode::InvalidArgument, "kappa must lie in (0, 1)");
  if (kappa > analytic_kappa(domain) + 1e-12)
    fail(ErrorCode::KappaTooLarge, "requested kappa exceeds the fatness constant of the domain");
  // Cheap candidates first: Q itself, then Q moved r/2 along the reference direction.
  for (const Vec& a : {q, q + domain.reference_direction() * (0.5 * r)})
    if (witness_score(domain, q, r, a) >= kappa) return a;
  const Vec a = best_witness(domain, q, r);
  if (witness_score(domain, q, r, a) >= kappa) return a;
  fail(ErrorCode::KappaTooLarge, "no witness ball of the requested size found");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec vec_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::ConfigInvalid, std::string("domain needs '") + key + "'");
  const auto c = j.at(key).get<std::vector<double>>();
  if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim))
    fail(ErrorCode::ConfigInvalid, "domain vectors must have 1 to 3 coordinates");
  return Vec::from_span(c);
}

}  // namespace

ConeDomain domain_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigInvalid, "domain must be an object");
  static const std::set<std::string> allowed = {"kind", "axis", "half_angle", "dim"};
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) fail(ErrorCode::ConfigInvalid, "unknown field '" + key + "' in domain");
  if (!j.contains("kind")) fail(ErrorCode::ConfigInvalid, "domain needs 'kind'");
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "halfspace") return ConeDomain::half_space(vec_field(j, "axis"));
    if (kind == "cone") {
      if (!j.contains("half_angle")) fail(ErrorCode::ConfigInvalid, "cone needs 'half_angle'");
      return ConeDomain::circular_cone(vec_field(j, "axis"), j.at("half_angle").get<double>());
    }
    if (kind == "complement_hyperplane") return ConeDomain::complement_hyperplane(vec_field(j, "axis"));
    if (kind == "full") {
      if (j.contains("dim")) return ConeDomain::full_space(j.at("dim").get<int>());
      return ConeDomain::full_space(vec_field(j, "axis").dim());
    }
    fail(ErrorCode::ConfigInvalid, "unknown domain kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigInvalid, std::string("bad domain field: ") + e.what());
  }
}

nlohmann::json to_json(const ConeDomain& domain) {
  const auto axis = std::vector<double>(domain.axis().coords().begin(), domain.axis().coords().end());
  switch (domain.kind()) {
    case ConeDomain::Kind::FullSpace: return {{"kind", "full"}, {"dim", domain.dim()}};
    case ConeDomain::Kind::HalfSpace: return {{"kind", "halfspace"}, {"axis", axis}};
    case ConeDomain::Kind::CircularCone:
      return {{"kind", "cone"}, {"axis", axis}, {"half_angle", domain.half_angle()}};
    case ConeDomain::Kind::ComplementHyperplane:
      return {{"kind", "complement_hyperplane"}, {"axis", axis}};
  }
  return {};
}

}  // namespace anisotable
