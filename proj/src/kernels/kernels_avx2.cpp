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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "anisotable/kernels.hpp"

namespace anisotable::kernels::avx2 {
namespace {

// exp on four lanes: Cephes rational approximation on [-ln2/2, ln2/2]
// scaled by 2^n built directly in the exponent field. Lanes below -700
// return 0, matching std::exp to within the 1e-300 noise floor.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-700.0), _CMP_GE_OQ);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, c1));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, c2));
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                      _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_and_pd(e, underflow);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double gaussian_sum_1d(std::span<const double> samples, double x, double inv_h) {
  const std::size_t n = samples.size();
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vh = _mm256_set1_pd(inv_h);
  const __m256d half = _mm256_set1_pd(-0.5);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(samples.data() + i)), vh);
    acc = _mm256_add_pd(acc, exp4(_mm256_mul_pd(half, _mm256_mul_pd(u, u))));
  }
  double sum = hsum(acc);
  if (i < n) sum += scalar::gaussian_sum_1d(samples.subspan(i), x, inv_h);
  return sum;
}

double gaussian_sum_2d(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       double inv_h) {
  const std::size_t n = xs.size();
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d vh = _mm256_set1_pd(inv_h);
  const __m256d half = _mm256_set1_pd(-0.5);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(xs.data() + i)), vh);
    const __m256d v = _mm256_mul_pd(_mm256_sub_pd(vy, _mm256_loadu_pd(ys.data() + i)), vh);
    const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(v, v));
    acc = _mm256_add_pd(acc, exp4(_mm256_mul_pd(half, r2)));
  }
  double sum = hsum(acc);
  if (i < n) sum += scalar::gaussian_sum_2d(xs.subspan(i), ys.subspan(i), px, py, inv_h);
  return sum;
}

std::size_t count_greater(std::span<const double> values, double threshold) {
  const std::size_t n = values.size();
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(values.data() + i), t, _CMP_GT_OQ));
    c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  return c + scalar::count_greater(values.subspan(i), threshold);
}

}  // namespace anisotable::kernels::avx2
