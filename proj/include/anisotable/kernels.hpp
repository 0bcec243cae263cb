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

#include <cstddef>
#include <span>
#include <string_view>

namespace anisotable::kernels {

enum class Isa { Scalar, Avx2 };

/// ISA picked once at first use: AVX2+FMA when the CPU reports it, unless
/// ANISOTABLE_SIMD=scalar is set in the environment.
Isa active_isa();
std::string_view to_string(Isa isa);
bool isa_available(Isa isa);

/// sum_i exp(-((x - s_i) inv_h)^2 / 2).
double gaussian_sum_1d(std::span<const double> samples, double x, double inv_h);
/// sum_i exp(-(|(px, py) - (xs_i, ys_i)| inv_h)^2 / 2).
double gaussian_sum_2d(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       double inv_h);
/// Number of entries strictly greater than `threshold`.
std::size_t count_greater(std::span<const double> values, double threshold);

// Per-ISA entry points. The scalar versions are the reference; the AVX2
// versions agree to a relative 1e-13 on the sums and exactly on counts.
namespace scalar {
double gaussian_sum_1d(std::span<const double> samples, double x, double inv_h);
double gaussian_sum_2d(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       double inv_h);
std::size_t count_greater(std::span<const double> values, double threshold);
}  // namespace scalar

namespace avx2 {
double gaussian_sum_1d(std::span<const double> samples, double x, double inv_h);
double gaussian_sum_2d(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       double inv_h);
std::size_t count_greater(std::span<const double> values, double threshold);
}  // namespace avx2

}  // namespace anisotable::kernels
