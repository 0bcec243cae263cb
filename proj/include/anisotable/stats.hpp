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
#include <vector>

namespace anisotable {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
/// Stephens small-sample correction. Inputs are copied and sorted.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double statistic, double dof);

/// Pearson chi-square goodness of fit of counts against probabilities.
/// Returns the p-value; dof = bins - 1.
double chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Weighted least squares of y on x. Needs two distinct x with positive weight.
LinearFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> w);

/// Merges adjacent bins (in order) until every group carries at least
/// `min_expected` of the pooled count; a short tail is folded into the last
/// full group. Returns the group index of every input bin.
std::vector<std::size_t> merge_groups(std::span<const double> pooled, double min_expected);

/// Total variation distance between two count vectors on shared bins,
/// after merging bins whose pooled count per sample falls below
/// `min_expected`.
double tv_distance(std::span<const double> counts_a, std::span<const double> counts_b,
                   double min_expected = 5.0);

/// TV distance between empirical counts and reference probabilities;
/// bins are merged while the expected count n p is below `min_expected`.
double tv_to_reference(std::span<const double> counts, std::span<const double> probs,
                       double min_expected = 5.0);

/// Linear-interpolated quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

/// Silverman's rule with the robust spread min(sd, IQR / 1.34).
double silverman_bandwidth(std::span<const double> samples);

double mean(std::span<const double> x);
double sample_sd(std::span<const double> x);

}  // namespace anisotable
