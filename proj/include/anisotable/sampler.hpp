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

#include "anisotable/cone_geometry.hpp"
#include "anisotable/parallel.hpp"
#include "anisotable/rng.hpp"
#include "anisotable/stable_model.hpp"

namespace anisotable {

enum class SmallJumpMode { Drop, GaussianSurrogate };

/// Discretization of the process: jumps longer than `eps` are simulated
/// exactly as a compound Poisson stream, the rest is dropped or replaced by
/// a Gaussian with the same mean and covariance. `delta` is the skeleton
/// step at which the continuous part is applied and checked.
struct SchemeParams {
  double eps = 0.0;
  double delta = 0.0;
  SmallJumpMode small_jump_mode = SmallJumpMode::Drop;
  long max_jumps_per_step = 0;

  /// delta = t_max / 2048, eps = delta^{1/alpha}, Drop at alpha = 1 and
  /// GaussianSurrogate otherwise, cap = 20x the expected jumps per step
  /// (at least 64).
  static SchemeParams defaults(const StableModel& model, double t_max);
  /// Same rule with an explicit cutoff.
  static SchemeParams with_cutoff(const StableModel& model, double eps, double delta);
};

/// Throws InvalidScheme unless eps > 0, delta > 0 and the jump cap is at
/// least 20x the expected number of jumps per step.
void validate_scheme(const StableModel& model, const SchemeParams& scheme);

enum class ExitKind { Jump, SkeletonCrossing, Censored };

std::string_view to_string(ExitKind kind);

/// Censored exit data of one path: (tau, X_{tau-}, X_tau).
/// Survivors carry exit_time = t_max and their final position in both
/// pre_exit and post_exit.
struct ExitRecord {
  Vec start;
  bool survived = false;
  double exit_time = 0.0;
  Vec pre_exit;
  Vec post_exit;
  ExitKind exit_kind = ExitKind::Censored;
  /// Big jumps simulated on the path, the exit jump included.
  long jumps = 0;
};

/// Direction distributed as lambda(w) sigma(dw) / zeta(S^{d-1}).
Vec sample_direction(const StableModel& model, Rng& rng);

/// Approximate sample of X_t - X_0 under the scheme.
Vec sample_increment(const StableModel& model, double t, const SchemeParams& scheme, Rng& rng);

/// Exact sample of the one-dimensional strictly stable Y_t with Levy
/// density c_minus |z|^{-1-alpha} (z < 0) + c_plus |z|^{-1-alpha} (z > 0),
/// by Chambers-Mallows-Stuck. At alpha = 1 only c_minus == c_plus is
/// strictly stable; otherwise throws AlphaOneAsymmetric.
double sample_increment_1d_exact(double alpha, double c_minus, double c_plus, double t, Rng& rng);

/// Simulates paths of one model under one scheme. Holds the precomputed
/// compensation drift, Gaussian factor and jump rate.
class PathSimulator {
 public:
  PathSimulator(const StableModel& model, const SchemeParams& scheme);

  /// Runs one path from x0 until it leaves `domain` or t_max passes.
  /// Positions at the (sorted) observation times are written to
  /// `observed[i]` while the path is alive; entries for times at or after
  /// the exit are left untouched.
  ExitRecord run(const ConeDomain& domain, const Vec& x0, double t_max, Rng& rng,
                 std::span<const double> observe_times = {}, std::span<Vec> observed = {}) const;

  Vec increment(double t, Rng& rng) const;

  const StableModel& model() const { return model_; }
  const SchemeParams& scheme() const { return scheme_; }
  /// Deterministic velocity between jumps.
  const Vec& drift() const { return drift_; }
  double jump_rate() const { return jump_rate_; }

 private:
  Vec big_jump(Rng& rng) const;
  Vec gaussian(double t, Rng& rng) const;

  StableModel model_;
  SchemeParams scheme_;
  double jump_rate_ = 0.0;
  Vec drift_;
  bool has_drift_ = false;
  bool has_gaussian_ = false;
  Mat chol_{};
};

ExitRecord sample_path_exit(const StableModel& model, const ConeDomain& domain, const Vec& x0,
                            double t_max, const SchemeParams& scheme, Rng& rng);

/// n independent exit records in path order, simulated in batches.
std::vector<ExitRecord> simulate_exits(const StableModel& model, const ConeDomain& domain,
                                       const Vec& x0, double t_max, const SchemeParams& scheme,
                                       std::size_t n, const RunContext& ctx);

/// Exit records plus, for every observation time, the positions of the
/// paths still alive at that time (in path order).
struct SnapshotRun {
  std::vector<ExitRecord> records;
  std::vector<std::vector<Vec>> alive_positions;
};

SnapshotRun simulate_snapshots(const StableModel& model, const ConeDomain& domain, const Vec& x0,
                               std::span<const double> observe_times, const SchemeParams& scheme,
                               std::size_t n, const RunContext& ctx);

/// n free increments X_t - X_0 in path order.
std::vector<Vec> simulate_increments(const StableModel& model, double t, const SchemeParams& scheme,
                                     std::size_t n, const RunContext& ctx);

/// n exact one-dimensional samples in path order.
std::vector<double> simulate_increments_1d_exact(double alpha, double c_minus, double c_plus, double t,
                                                 std::size_t n, const RunContext& ctx);

struct BiasProbeReport {
  double scaling_ks = 0.0;
  double scaling_p = 0.0;
  double oracle_ks = 0.0;
  double oracle_p = 0.0;
  bool passed = false;
  double suggested_eps = 0.0;
  double suggested_delta = 0.0;
};

/// Two self-checks of a scheme at unit time: t^{-1/alpha} X_t against X_1
/// (t = 4) and the projection <X_1, e_1> against the exact one-dimensional
/// sampler (skipped, p = 1, when alpha = 1 and the model is not symmetric).
/// Passing means both two-sample KS p-values exceed 0.01.
BiasProbeReport scheme_bias_probe(const StableModel& model, const SchemeParams& scheme,
                                  std::size_t n, const RunContext& ctx);

}  // namespace anisotable
