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

#include <cmath>

#include "anisotable/kernels.hpp"

namespace anisotable::kernels::scalar {

double gaussian_sum_1d(std::span<const double> samples, double x, double inv_h) {
  double sum = 0.0;
  for (double s : samples) {
    const double u = (x - s) * inv_h;
    sum += std::exp(-0.5 * u * u);
  }
  return sum;
}

double gaussian_sum_2d(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       double inv_h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = (px - xs[i]) * inv_h;
    const double v = (py - ys[i]) * inv_h;
    sum += std::exp(-0.5 * (u * u + v * v));
  }
  return sum;
}

std::size_t count_greater(std::span<const double> values, double threshold) {
  std::size_t c = 0;
  for (double v : values) c += v > threshold ? 1 : 0;
  return c;
}

}  // namespace anisotable::kernels::scalar
