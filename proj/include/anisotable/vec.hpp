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
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>

namespace anisotable {

inline constexpr int kMaxDim = 3;

/// Point or displacement in R^d for d <= kMaxDim. Coordinates past `dim`
/// are kept at zero so dot products and norms never need the dimension.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim) : dim_(dim) { assert(dim >= 1 && dim <= kMaxDim); }
  Vec(std::initializer_list<double> coords)
      : dim_(static_cast<int>(coords.size())) {
    assert(dim_ >= 1 && dim_ <= kMaxDim);
    int i = 0;
    for (double c : coords) c_[i++] = c;
  }
  static Vec from_span(std::span<const double> coords) {
    Vec v(static_cast<int>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) v.c_[i] = coords[i];
    return v;
  }
  static Vec unit(int dim, int axis) {
    Vec v(dim);
    v.c_[axis] = 1.0;
    return v;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < kMaxDim; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < kMaxDim; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (double& c : c_) c *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }
  friend bool operator==(const Vec& a, const Vec& b) = default;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 1;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) { return a * (1.0 / norm(a)); }

}  // namespace anisotable
