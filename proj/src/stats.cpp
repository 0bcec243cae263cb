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

#include "anisotable/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "anisotable/error.hpp"

namespace anisotable {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::InvalidArgument, "KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double chi_square_sf(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

double chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    fail(ErrorCode::InvalidArgument, "chi-square needs matching count and probability vectors");
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = n * probs[k];
    const double diff = static_cast<double>(counts[k]) - e;
    stat += diff * diff / e;
  }
  return chi_square_sf(stat, static_cast<double>(counts.size() - 1));
}

LinearFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  if (!(sw > 0.0)) fail(ErrorCode::DegenerateGrid, "regression has no positive weight");
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::DegenerateGrid, "regression abscissae are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::vector<std::size_t> merge_groups(std::span<const double> pooled, double min_expected) {
  std::vector<std::size_t> group(pooled.size(), 0);
  std::size_t g = 0;
  double acc = 0.0;
  std::size_t last_full = 0;
  bool any_full = false;
  std::size_t open_start = 0;
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    group[k] = g;
    acc += pooled[k];
    if (acc >= min_expected) {
      last_full = g;
      any_full = true;
      ++g;
      acc = 0.0;
      open_start = k + 1;
    }
  }
  // The trailing partial group joins the last full one.
  if (any_full)
    for (std::size_t k = open_start; k < pooled.size(); ++k) group[k] = last_full;
  return group;
}

namespace {

double tv_grouped(std::span<const double> p, std::span<const double> q,
                  const std::vector<std::size_t>& group) {
  const std::size_t groups = group.empty() ? 0 : group.back() + 1;
  std::vector<double> gp(std::max<std::size_t>(groups, 1), 0.0);
  std::vector<double> gq(gp.size(), 0.0);
  for (std::size_t k = 0; k < group.size(); ++k) {
    gp[group[k]] += p[k];
    gq[group[k]] += q[k];
  }
  double tv = 0.0;
  for (std::size_t g = 0; g < gp.size(); ++g) tv += std::abs(gp[g] - gq[g]);
  return 0.5 * tv;
}

std::vector<double> normalized_counts(std::span<const double> c) {
  const double s = std::accumulate(c.begin(), c.end(), 0.0);
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "histogram is empty");
  std::vector<double> p(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) p[k] = c[k] / s;
  return p;
}

}  // namespace

double tv_distance(std::span<const double> counts_a, std::span<const double> counts_b,
                   double min_expected) {
  if (counts_a.size() != counts_b.size()) fail(ErrorCode::InvalidArgument, "histograms differ in size");
  const auto p = normalized_counts(counts_a);
  const auto q = normalized_counts(counts_b);
  // Expected count per sample under the pooled law, sized to the smaller sample.
  const double na = std::accumulate(counts_a.begin(), counts_a.end(), 0.0);
  const double nb = std::accumulate(counts_b.begin(), counts_b.end(), 0.0);
  const double n = std::min(na, nb);
  std::vector<double> pooled(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) pooled[k] = 0.5 * (p[k] + q[k]) * n;
  return tv_grouped(p, q, merge_groups(pooled, min_expected));
}

double tv_to_reference(std::span<const double> counts, std::span<const double> probs,
                       double min_expected) {
  if (counts.size() != probs.size()) fail(ErrorCode::InvalidArgument, "histogram and reference differ in size");
  const auto p = normalized_counts(counts);
  const auto q = normalized_counts(probs);
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> expected(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) expected[k] = q[k] * n;
  return tv_grouped(p, q, merge_groups(expected, min_expected));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::InvalidArgument, "quantile of empty data");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return sorted[lo] + f * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) fail(ErrorCode::InvalidArgument, "bandwidth needs at least two samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  const double sd = sample_sd(s);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(s.size()), -0.2);
}

}  // namespace anisotable
