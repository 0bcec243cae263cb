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

#include <cstdlib>
#include <string_view>

#include "anisotable/kernels.hpp"

namespace anisotable::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("ANISOTABLE_SIMD"); env && std::string_view(env) == "scalar")
    return Isa::Scalar;
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(ANISOTABLE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double gaussian_sum_1d(std::span<const double> samples, double x, double inv_h) {
#ifdef ANISOTABLE_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::gaussian_sum_1d(samples, x, inv_h);
#endif
  return scalar::gaussian_sum_1d(samples, x, inv_h);
}

double gaussian_sum_2d(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       double inv_h) {
#ifdef ANISOTABLE_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::gaussian_sum_2d(xs, ys, px, py, inv_h);
#endif
  return scalar::gaussian_sum_2d(xs, ys, px, py, inv_h);
}

std::size_t count_greater(std::span<const double> values, double threshold) {
#ifdef ANISOTABLE_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::count_greater(values, threshold);
#endif
  return scalar::count_greater(values, threshold);
}

}  // namespace anisotable::kernels
