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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anisotable/cone_geometry.hpp"
#include "anisotable/parallel.hpp"
#include "anisotable/sampler.hpp"
#include "anisotable/stable_model.hpp"

namespace anisotable {

/// Point estimate with standard error and a two-sided 95% interval.
/// Bernoulli estimates carry std_error = sqrt(p (1 - p) / n) and the normal
/// interval clamped to [0, 1]; regression slopes carry bootstrap
/// percentiles.
struct EstimateCI {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::string method;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

EstimateCI bernoulli_estimate(std::size_t successes, std::size_t n);

/// Seeding and scheme shared by all estimators. Without an explicit scheme
/// each call uses SchemeParams::defaults for its own horizon.
struct EstimatorOptions {
  RunContext run;
  std::optional<SchemeParams> scheme;
  std::size_t bootstrap_resamples = 200;
  /// Survival frequencies below min_count / n are dropped from regressions.
  double min_count = 500.0;
};

/// Rectangular grid over a window; samples outside the window fall into
/// the nearest edge bin, so masses always sum to one.
struct BinSpec {
  Vec lo;
  Vec hi;
  std::vector<int> bins;

  int dim() const { return lo.dim(); }
  std::size_t total_bins() const;
  std::size_t index_of(const Vec& x) const;
  /// Lower and upper corner of a flat bin index.
  std::pair<Vec, Vec> bounds(std::size_t flat) const;
};

struct EmpiricalMeasure {
  BinSpec binning;
  std::vector<double> counts;
  std::vector<double> masses;
  std::size_t samples = 0;
};

EmpiricalMeasure histogram(const BinSpec& spec, std::span<const Vec> points, double scale = 1.0);

// ---------------------------------------------------------------------------
// Survival

/// P_x(tau > t) from n paths. The full space returns 1 without simulating.
EstimateCI survival_probability(const StableModel& model, const ConeDomain& domain, const Vec& x,
                                double t, std::size_t n, const EstimatorOptions& opt);

/// P_x(tau > t) at every grid time from one shared set of paths run to the
/// largest time, so the curve is non-increasing by construction.
struct SurvivalCurve {
  std::vector<double> times;
  std::vector<std::size_t> alive;
  std::size_t n = 0;
  std::vector<EstimateCI> estimates() const;
};

SurvivalCurve survival_curve(const StableModel& model, const ConeDomain& domain, const Vec& x,
                             std::span<const double> t_grid, std::size_t n, const EstimatorOptions& opt);
SurvivalCurve survival_curve_from_records(std::span<const ExitRecord> records, std::span<const double> t_grid);

struct ExponentFit {
  EstimateCI estimate;
  double intercept = 0.0;
  std::vector<double> abscissa;
  std::vector<EstimateCI> survival;
  std::vector<bool> used;
};

/// -slope of log P vs log t, which estimates beta / alpha. Weighted least
/// squares with weights n p / (1 - p); bootstrap over paths for the CI.
/// Throws DegenerateGrid with fewer than three usable points.
ExponentFit survival_exponent_time(const StableModel& model, const ConeDomain& domain, const Vec& x,
                                   std::span<const double> t_grid, std::size_t n,
                                   const EstimatorOptions& opt);

/// Slope of log P_{s u}(tau > t) vs log s over small radii s, which
/// estimates beta. Throws AllPathsDied when no radius has a usable survival
/// frequency and DegenerateGrid with fewer than three usable radii.
ExponentFit survival_exponent_space(const StableModel& model, const ConeDomain& domain, const Vec& direction,
                                    std::span<const double> s_grid, double t, std::size_t n,
                                    const EstimatorOptions& opt);

/// P(<X_1, u> > 0) by Monte Carlo. Uses the exact one-dimensional sampler
/// when the projection is strictly stable on its own, the scheme otherwise.
EstimateCI sign_frequency(const StableModel& model, const Vec& direction, std::size_t n,
                          const EstimatorOptions& opt);

// ---------------------------------------------------------------------------
// Densities

/// Gaussian KDE of X_t at `points` (d <= 2) compared with the envelope
/// t^{-d/alpha} min(1, t^{1 + d/alpha} |x|^{-d-alpha}). `constant` is the
/// smallest c with every value inside [envelope / c, c envelope].
struct HeatKernelReport {
  std::vector<double> density;
  std::vector<double> envelope;
  double bandwidth = 0.0;
  double constant = 0.0;
};

HeatKernelReport heat_kernel_density(const StableModel& model, double t, std::span<const Vec> points,
                                     std::size_t n, std::optional<double> bandwidth,
                                     const EstimatorOptions& opt);

/// Gaussian kernel density of `samples` at `at`, normalized by `total`
/// rather than by the sample count (so killed mass is accounted for).
double kde_at(std::span<const Vec> samples, const Vec& at, double bandwidth, std::size_t total);

/// Robust Silverman bandwidth pooled over coordinates.
double default_bandwidth(std::span<const Vec> samples);

struct FactorizationTable {
  std::vector<double> killed_density;  // p_t^D(x_i, y_j), row-major
  std::vector<double> free_density;    // p_t(x_i, y_j)
  std::vector<EstimateCI> survival_x;  // P_{x_i}(tau > t)
  std::vector<EstimateCI> survival_y;  // dual survival from y_j
  std::vector<double> ratio;           // R(x_i, y_j)
  std::size_t rows = 0;
  std::size_t cols = 0;
  double bandwidth = 0.0;
  /// max R / min R; +infinity when some ratio is 0 or undefined.
  double spread = 0.0;
};

/// R(x, y) = p_t^D(x, y) / (P_x(tau > t) p_t(x, y) P^_y(tau > t)). Throws
/// TooFewSurvivors when a start point keeps fewer than 500 survivors.
FactorizationTable factorization_ratio(const StableModel& model, const ConeDomain& domain,
                                       std::span<const Vec> x_list, std::span<const Vec> y_list, double t,
                                       std::size_t n, std::optional<double> bandwidth,
                                       const EstimatorOptions& opt);

// ---------------------------------------------------------------------------
// Exit laws

/// Bins of the pre-exit distance u; `u_edges` empty means quantile bins.
struct OvershootBins {
  std::vector<double> u_edges;
  int u_bins = 10;
  int v_bins = 10;
};

/// Given a jump exit from a half-line at distance u, the landing point
/// z = u - J has J with tail (u / s)^alpha, so V = (u / J)^alpha is
/// uniform on (0, 1]. Each u-bin compares the histogram of V with the
/// uniform law; the aggregate is the count-weighted mean TV.
struct OvershootReport {
  std::vector<double> u_edges;
  std::vector<std::size_t> counts;
  std::vector<double> tv;
  double aggregate_tv = 0.0;
  std::size_t jump_exits = 0;
};

OvershootReport overshoot_conditional_check(const StableModel& model, const ConeDomain& domain, const Vec& x,
                                            double t_max, std::size_t n, const OvershootBins& bins,
                                            const EstimatorOptions& opt);
/// Jump exits with pre-exit distance at or below `min_u` are skipped.
OvershootReport overshoot_from_records(const StableModel& model, const ConeDomain& domain,
                                       std::span<const ExitRecord> records, const OvershootBins& bins,
                                       double min_u = 0.0);

// ---------------------------------------------------------------------------
// Yaglom

/// Histogram of t^{-1/alpha} X_t over paths alive at t. Throws
/// TooFewSurvivors when no path survives.
EmpiricalMeasure yaglom_histogram(const StableModel& model, const ConeDomain& domain, const Vec& start,
                                  double t, std::size_t n, const BinSpec& bins, const EstimatorOptions& opt);

/// Histograms for every (start, t) pair, TV between consecutive times for
/// each start, and TV of every start against the first one at the largest t.
struct YaglomTable {
  std::vector<double> times;
  std::vector<std::vector<EmpiricalMeasure>> histograms;  // [start][time]
  std::vector<std::vector<double>> tv_consecutive;        // [start][time - 1]
  std::vector<double> tv_across_starts;                   // [start], first is 0
};

YaglomTable yaglom_convergence(const StableModel& model, const ConeDomain& domain,
                               std::span<const Vec> start_list, std::span<const double> t_grid, std::size_t n,
                               const BinSpec& bins, const EstimatorOptions& opt);

// ---------------------------------------------------------------------------
// Half-space profile

/// Survival at distances delta_i from the boundary of a half-space. The
/// branch delta <= t^{1/alpha} / 4 gives the exponent, the plateau
/// delta >= 4 t^{1/alpha} a slope that should vanish.
struct ProfileReport {
  std::vector<double> distances;
  std::vector<EstimateCI> survival;
  ExponentFit branch;
  EstimateCI plateau_slope;
  double plateau_level = 0.0;
};

ProfileReport halfspace_profile_check(const StableModel& model, const ConeDomain& domain,
                                      std::span<const double> x_grid, double t, std::size_t n,
                                      const EstimatorOptions& opt);

}  // namespace anisotable
