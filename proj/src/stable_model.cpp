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

#include "anisotable/stable_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "anisotable/error.hpp"
#include "anisotable/rng.hpp"

namespace anisotable {
namespace {

using std::numbers::pi;

std::vector<SphereNode> circle_rule() {
  constexpr int kNodes = 4096;
  std::vector<SphereNode> nodes;
  nodes.reserve(kNodes);
  const double w = 2.0 * pi / kNodes;
  // Half-step offset keeps nodes off axis-aligned equators and off the cell
  // edges of regular tables; the second half is the exact antipode of the first.
  for (int k = 0; k < kNodes / 2; ++k) {
    const double phi = w * (k + 0.5);
    nodes.push_back({Vec{std::cos(phi), std::sin(phi)}, w});
  }
  for (int k = 0; k < kNodes / 2; ++k) nodes.push_back({-nodes[k].direction, w});
  return nodes;
}

Vec cross(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Level-4 subdivided icosahedron projected to the sphere: 2562 vertices.
// Each vertex carries one third of the spherical area of its triangles.
std::vector<SphereNode> icosphere_rule() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec& v : verts) v = normalized(v);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < 4; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(verts.size()));
      if (inserted) verts.push_back(normalized(verts[a] + verts[b]));
      return it->second;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  std::vector<SphereNode> nodes(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) nodes[i].direction = verts[i];
  for (const auto& f : faces) {
    const Vec& a = verts[f[0]];
    const Vec& b = verts[f[1]];
    const Vec& c = verts[f[2]];
    // Van Oosterom-Strackee solid angle of a spherical triangle.
    const double num = std::abs(dot(a, cross(b, c)));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    const double area = 2.0 * std::atan2(num, den);
    for (int v : f) nodes[v].weight += area / 3.0;
  }
  return nodes;
}

std::vector<SphereNode> make_rule(int dim) {
  switch (dim) {
    case 1: return {{Vec{1.0}, 1.0}, {Vec{-1.0}, 1.0}};
    case 2: return circle_rule();
    case 3: return icosphere_rule();
    default: fail(ErrorCode::UnsupportedDimension, "dimension must be 1, 2 or 3");
  }
}

void require_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorCode::UnsupportedDimension, "dimension must be 1, 2 or 3");
}

double angle_of(const Vec& w) { return std::atan2(w[1], w[0]); }

}  // namespace

std::span<const SphereNode> sphere_quadrature(int dim) {
  require_dim(dim);
  static const std::array<std::vector<SphereNode>, 3> rules = {make_rule(1), make_rule(2),
                                                               make_rule(3)};
  return rules[dim - 1];
}

// ---------------------------------------------------------------------------
// SphericalDensity

SphericalDensity SphericalDensity::constant(int dim, double value) {
  require_dim(dim);
  SphericalDensity d;
  d.kind_ = Kind::Constant;
  d.dim_ = dim;
  d.plus_ = d.minus_ = value;
  return d;
}

SphericalDensity SphericalDensity::hemisphere(const Vec& axis, double plus_weight,
                                              double minus_weight) {
  require_dim(axis.dim());
  if (!(norm(axis) > 0.0)) fail(ErrorCode::InvalidArgument, "hemisphere axis must be nonzero");
  SphericalDensity d;
  d.kind_ = Kind::Hemisphere;
  d.dim_ = axis.dim();
  d.axis_ = normalized(axis);
  d.plus_ = plus_weight;
  d.minus_ = minus_weight;
  return d;
}

SphericalDensity SphericalDensity::tabulated(std::vector<Vec> points, std::vector<double> values) {
  if (points.empty() || points.size() != values.size())
    fail(ErrorCode::InvalidArgument, "tabulated density needs matching nonempty points/values");
  const int dim = points.front().dim();
  require_dim(dim);
  for (Vec& p : points) {
    if (p.dim() != dim || !(norm(p) > 0.0))
      fail(ErrorCode::InvalidArgument, "tabulated points must be nonzero and share a dimension");
    p = normalized(p);
  }
  SphericalDensity d;
  d.kind_ = Kind::Tabulated;
  d.dim_ = dim;
  d.points_ = std::move(points);
  d.values_ = std::move(values);
  if (dim == 2) {
    std::vector<std::pair<double, double>> cells;
    cells.reserve(d.points_.size());
    for (std::size_t i = 0; i < d.points_.size(); ++i)
      cells.emplace_back(angle_of(d.points_[i]), d.values_[i]);
    std::sort(cells.begin(), cells.end());
    for (const auto& [a, v] : cells) {
      d.sorted_angles_.push_back(a);
      d.sorted_values_.push_back(v);
    }
  }
  return d;
}

double SphericalDensity::tabulated_value(const Vec& w) const {
  if (dim_ == 2) {
    // Nearest cell on the circle: compare the two bracketing nodes,
    // wrapping around at +-pi.
    const double a = angle_of(w);
    const auto n = sorted_angles_.size();
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(sorted_angles_.begin(), sorted_angles_.end(), a) - sorted_angles_.begin());
    const std::size_t right = hi % n;
    const std::size_t left = (hi + n - 1) % n;
    auto gap = [](double x, double y) {
      double g = std::abs(x - y);
      return std::min(g, 2.0 * pi - g);
    };
    return gap(a, sorted_angles_[left]) <= gap(a, sorted_angles_[right]) ? sorted_values_[left]
                                                                         : sorted_values_[right];
  }
  std::size_t best = 0;
  double best_dot = -2.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double c = dot(points_[i], w);
    if (c > best_dot) {
      best_dot = c;
      best = i;
    }
  }
  return values_[best];
}

double SphericalDensity::operator()(const Vec& w) const {
  switch (kind_) {
    case Kind::Constant: return plus_;
    case Kind::Hemisphere: return dot(w, axis_) >= 0.0 ? plus_ : minus_;
    case Kind::Tabulated: return tabulated_value(w);
  }
  return 0.0;
}

SphericalDensity SphericalDensity::reflected() const {
  switch (kind_) {
    case Kind::Constant: return *this;
    case Kind::Hemisphere: {
      // Swapping the weights agrees with lambda(-w) off the equator, a null set.
      return hemisphere(axis_, minus_, plus_);
    }
    case Kind::Tabulated: {
      std::vector<Vec> pts;
      pts.reserve(points_.size());
      for (const Vec& p : points_) pts.push_back(-p);
      return tabulated(std::move(pts), values_);
    }
  }
  return *this;
}

double SphericalDensity::min_value() const {
  if (kind_ == Kind::Tabulated) return *std::min_element(values_.begin(), values_.end());
  return std::min(plus_, minus_);
}

double SphericalDensity::max_value() const {
  if (kind_ == Kind::Tabulated) return *std::max_element(values_.begin(), values_.end());
  return std::max(plus_, minus_);
}

// ---------------------------------------------------------------------------
// StableModel

StableModel StableModel::validate(const ModelSpec& spec) {
  require_dim(spec.dim);
  if (!(spec.alpha > 0.0 && spec.alpha < 2.0))
    fail(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 2), got " + std::to_string(spec.alpha));
  if (spec.density.dim() != spec.dim)
    fail(ErrorCode::InvalidArgument, "density dimension does not match model dimension");
  if (!(spec.theta_low > 0.0) || !(spec.theta_low <= spec.theta_high))
    fail(ErrorCode::ThetaBoundViolated, "need 0 < theta_low <= theta_high");

  const auto check = [&](double v) {
    if (!(v >= spec.theta_low && v <= spec.theta_high))
      fail(ErrorCode::ThetaBoundViolated,
           "density value " + std::to_string(v) + " outside [theta_low, theta_high]");
  };
  check(spec.density.min_value());
  check(spec.density.max_value());

  StableModel model(spec);
  const int d = spec.dim;
  model.mean_ = Vec(d);
  bool symmetric = true;
  for (const SphereNode& node : sphere_quadrature(d)) {
    const double lam = spec.density(node.direction);
    check(lam);
    const double wl = node.weight * lam;
    model.total_mass_ += wl;
    model.mean_ += node.direction * wl;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        model.second_moment_[i][j] += wl * node.direction[i] * node.direction[j];
    if (spec.density(-node.direction) != lam) symmetric = false;
  }
  model.symmetric_ = symmetric;
  if (symmetric) model.mean_ = Vec(d);

  if (spec.alpha == 1.0 && norm(model.mean_) > kMeanTolerance * model.total_mass_)
    fail(ErrorCode::AlphaOneAsymmetric,
         "alpha = 1 requires a vanishing spherical mean for strict stability");
  return model;
}

double StableModel::big_jump_rate(double eps) const {
  return total_mass_ * std::pow(eps, -alpha()) / alpha();
}

Vec StableModel::small_jump_mean(double eps) const {
  return mean_ * (std::pow(eps, 1.0 - alpha()) / (1.0 - alpha()));
}

Vec StableModel::big_jump_mean(double eps) const {
  return mean_ * (std::pow(eps, 1.0 - alpha()) / (alpha() - 1.0));
}

Mat StableModel::small_jump_covariance(double eps) const {
  const double radial = std::pow(eps, 2.0 - alpha()) / (2.0 - alpha());
  Mat cov{};
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = 0; j < kMaxDim; ++j) cov[i][j] = second_moment_[i][j] * radial;
  return cov;
}

double levy_density(const StableModel& model, const Vec& x) {
  const double r = norm(x);
  if (!(r > 0.0)) fail(ErrorCode::OriginEvaluation, "Levy density is singular at the origin");
  return model.density()(x * (1.0 / r)) * std::pow(r, -model.dim() - model.alpha());
}

double pruitt_h(const StableModel& model, double r) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "pruitt_h needs r > 0");
  const double a = model.alpha();
  const double mass = model.total_mass();
  // At r = 1: r^-2 int_{B_1} |z|^2 nu = mass / (2 - a), nu(B_1^c) = mass / a.
  // The drift term reduces to |int_{B_1} z nu| for a < 1, to
  // |int_{B_1^c} z nu| for a > 1, and vanishes at a = 1.
  double drift = 0.0;
  if (a != 1.0) drift = norm(model.spherical_mean()) / std::abs(1.0 - a);
  const double h1 = mass / (2.0 - a) + mass / a + drift;
  return h1 * std::pow(r, -a);
}

ProjectionCoeffs projection_coefficients(const StableModel& model, const Vec& direction) {
  if (direction.dim() != model.dim() || std::abs(norm(direction) - 1.0) > 1e-9)
    fail(ErrorCode::InvalidArgument, "projection direction must be a unit vector of the model's dimension");
  ProjectionCoeffs out{direction, 0.0, 0.0};
  const double a = model.alpha();
  for (const SphereNode& node : sphere_quadrature(model.dim())) {
    const double c = dot(node.direction, direction);
    if (c == 0.0) continue;
    const double contrib = node.weight * model.density()(node.direction) * std::pow(std::abs(c), a);
    (c > 0.0 ? out.c_plus : out.c_minus) += contrib;
  }
  return out;
}

double positivity_parameter(const ProjectionCoeffs& coeffs, double alpha) {
  if (alpha == 1.0)
    fail(ErrorCode::AlphaEqualsOne, "Zolotarev's formula does not cover alpha = 1");
  if (!(coeffs.c_plus > 0.0 && coeffs.c_minus > 0.0))
    fail(ErrorCode::InvalidArgument, "projection coefficients must be positive");
  const double skew = (coeffs.c_plus - coeffs.c_minus) / (coeffs.c_plus + coeffs.c_minus);
  // The principal arctan branch already lands in (1 - 1/alpha, 1/alpha)
  // when alpha > 1, where tan(pi alpha / 2) < 0.
  return 0.5 + std::atan(skew * std::tan(pi * alpha / 2.0)) / (pi * alpha);
}

HalfspaceExponents halfspace_exponents(const StableModel& model, const Vec& inward_normal) {
  const Vec n = normalized(inward_normal);
  double rho = 0.5;
  if (model.alpha() == 1.0) {
    if (!model.symmetric())
      fail(ErrorCode::AlphaEqualsOne,
           "alpha = 1 with a non-symmetric density: estimate rho by Monte Carlo");
  } else {
    rho = positivity_parameter(projection_coefficients(model, n), model.alpha());
  }
  return {rho, model.alpha() * (1.0 - rho), model.alpha() * rho};
}

StableModel dual(const StableModel& model) {
  ModelSpec spec = model.spec();
  spec.density = spec.density.reflected();
  return StableModel::validate(spec);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
  if (!j.is_object()) fail(ErrorCode::ConfigInvalid, std::string(where) + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.contains(key)) fail(ErrorCode::ConfigInvalid, std::string("unknown field '") + key + "' in " + where);
}

template <class T>
T required(const nlohmann::json& j, const char* key, const char* where) {
  if (!j.contains(key))
    fail(ErrorCode::ConfigInvalid, std::string("missing field '") + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigInvalid, std::string("bad field '") + key + "' in " + where + ": " + e.what());
  }
}

Vec vec_from(const std::vector<double>& c) {
  if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim))
    fail(ErrorCode::ConfigInvalid, "vectors must have 1 to 3 coordinates");
  return Vec::from_span(c);
}

std::vector<double> coords_of(const Vec& v) { return {v.coords().begin(), v.coords().end()}; }

SphericalDensity density_from_json(const nlohmann::json& j, int dim) {
  const auto kind = required<std::string>(j, "kind", "density");
  if (kind == "constant") {
    reject_unknown(j, {"kind", "value"}, "density");
    return SphericalDensity::constant(dim, required<double>(j, "value", "density"));
  }
  if (kind == "hemisphere") {
    reject_unknown(j, {"kind", "axis", "plus_weight", "minus_weight"}, "density");
    return SphericalDensity::hemisphere(vec_from(required<std::vector<double>>(j, "axis", "density")),
                                        required<double>(j, "plus_weight", "density"),
                                        required<double>(j, "minus_weight", "density"));
  }
  if (kind == "tabulated") {
    reject_unknown(j, {"kind", "points", "values"}, "density");
    std::vector<Vec> pts;
    for (const auto& p : required<std::vector<std::vector<double>>>(j, "points", "density"))
      pts.push_back(vec_from(p));
    return SphericalDensity::tabulated(std::move(pts),
                                       required<std::vector<double>>(j, "values", "density"));
  }
  fail(ErrorCode::ConfigInvalid, "unknown density kind '" + kind + "'");
}

}  // namespace

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"alpha", "dim", "density", "theta_low", "theta_high"}, "model");
  ModelSpec spec;
  spec.alpha = required<double>(j, "alpha", "model");
  spec.dim = required<int>(j, "dim", "model");
  require_dim(spec.dim);
  if (!j.contains("density")) fail(ErrorCode::ConfigInvalid, "missing field 'density' in model");
  spec.density = density_from_json(j.at("density"), spec.dim);
  spec.theta_low = required<double>(j, "theta_low", "model");
  spec.theta_high = required<double>(j, "theta_high", "model");
  return spec;
}

nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json density;
  const auto& d = spec.density;
  switch (d.kind()) {
    case SphericalDensity::Kind::Constant:
      density = {{"kind", "constant"}, {"value", d.plus_weight()}};
      break;
    case SphericalDensity::Kind::Hemisphere:
      density = {{"kind", "hemisphere"},
                 {"axis", coords_of(d.axis())},
                 {"plus_weight", d.plus_weight()},
                 {"minus_weight", d.minus_weight()}};
      break;
    case SphericalDensity::Kind::Tabulated: {
      std::vector<std::vector<double>> pts;
      for (const Vec& p : d.points()) pts.push_back(coords_of(p));
      density = {{"kind", "tabulated"}, {"points", pts}, {"values", d.values()}};
      break;
    }
  }
  return {{"alpha", spec.alpha},
          {"dim", spec.dim},
          {"density", density},
          {"theta_low", spec.theta_low},
          {"theta_high", spec.theta_high}};
}

StableModel model_from_json(const nlohmann::json& j) {
  return StableModel::validate(model_spec_from_json(j));
}

std::uint64_t model_hash(const StableModel& model) {
  std::uint64_t h = 0x5EED;
  for (char c : to_json(model.spec()).dump()) h = hash_combine(h, static_cast<unsigned char>(c));
  return h;
}

}  // namespace anisotable
