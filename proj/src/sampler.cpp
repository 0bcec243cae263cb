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

#include "anisotable/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "anisotable/error.hpp"
#include "anisotable/stats.hpp"

namespace anisotable {
namespace {

using std::numbers::pi;

constexpr double kDefaultSteps = 2048.0;
constexpr double kCapFactor = 20.0;
constexpr long kMinCap = 64;

Vec uniform_on_sphere(int dim, Rng& rng) {
  Vec w(dim);
  const double u = rng.uniform();
  switch (dim) {
    case 1:
      w[0] = u < 0.5 ? -1.0 : 1.0;
      break;
    case 2:
      w[0] = std::cos(2.0 * pi * u);
      w[1] = std::sin(2.0 * pi * u);
      break;
    default: {
      const double v = rng.uniform();
      const double z = 2.0 * u - 1.0;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      w[0] = s * std::cos(2.0 * pi * v);
      w[1] = s * std::sin(2.0 * pi * v);
      w[2] = z;
    }
  }
  return w;
}

// Lower-triangular L with L L^T = a (pivots clamped at zero).
Mat cholesky(const Mat& a, int d) {
  Mat l{};
  for (int j = 0; j < d; ++j) {
    double diag = a[j][j];
    for (int k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
    l[j][j] = diag > 0.0 ? std::sqrt(diag) : 0.0;
    for (int i = j + 1; i < d; ++i) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = l[j][j] > 0.0 ? s / l[j][j] : 0.0;
    }
  }
  return l;
}

long expected_jumps_per_step(const StableModel& model, const SchemeParams& s) {
  return static_cast<long>(std::ceil(model.big_jump_rate(s.eps) * s.delta));
}

SchemeParams build(const StableModel& model, double eps, double delta) {
  SchemeParams s;
  s.eps = eps;
  s.delta = delta;
  s.small_jump_mode = model.alpha() == 1.0 ? SmallJumpMode::Drop : SmallJumpMode::GaussianSurrogate;
  if (eps > 0.0 && delta > 0.0)
    s.max_jumps_per_step = std::max(kMinCap, static_cast<long>(
        std::ceil(kCapFactor * static_cast<double>(std::max(1L, expected_jumps_per_step(model, s))))));
  return s;
}

}  // namespace

SchemeParams SchemeParams::defaults(const StableModel& model, double t_max) {
  if (!(t_max > 0.0)) fail(ErrorCode::InvalidScheme, "t_max must be positive");
  const double delta = t_max / kDefaultSteps;
  return build(model, std::pow(delta, 1.0 / model.alpha()), delta);
}

SchemeParams SchemeParams::with_cutoff(const StableModel& model, double eps, double delta) {
  return build(model, eps, delta);
}

void validate_scheme(const StableModel& model, const SchemeParams& s) {
  if (!(s.eps > 0.0) || !std::isfinite(s.eps)) fail(ErrorCode::InvalidScheme, "eps must be positive");
  if (!(s.delta > 0.0) || !std::isfinite(s.delta)) fail(ErrorCode::InvalidScheme, "delta must be positive");
  const double expected = model.big_jump_rate(s.eps) * s.delta;
  if (static_cast<double>(s.max_jumps_per_step) < kCapFactor * expected || s.max_jumps_per_step < 1)
    fail(ErrorCode::InvalidScheme, "max_jumps_per_step must be at least 20x the expected jumps per step");
}

std::string_view to_string(ExitKind kind) {
  switch (kind) {
    case ExitKind::Jump: return "jump";
    case ExitKind::SkeletonCrossing: return "skeleton_crossing";
    case ExitKind::Censored: return "censored";
  }
  return "censored";
}

Vec sample_direction(const StableModel& model, Rng& rng) {
  const SphericalDensity& lam = model.density();
  const int d = model.dim();
  if (d == 1) {
    // S^0 = {-1, +1}: one draw against the two point masses.
    const double plus = lam(Vec{1.0});
    return Vec{rng.uniform() * (plus + lam(Vec{-1.0})) < plus ? 1.0 : -1.0};
  }
  switch (lam.kind()) {
    case SphericalDensity::Kind::Constant:
      return uniform_on_sphere(d, rng);
    case SphericalDensity::Kind::Hemisphere: {
      // Both hemispheres have equal area, so the side is chosen by weight
      // and the uniform point is reflected into it.
      const double plus = lam.plus_weight();
      const bool to_plus = rng.uniform() * (plus + lam.minus_weight()) < plus;
      Vec w = uniform_on_sphere(d, rng);
      const double c = dot(w, lam.axis());
      if ((c >= 0.0) != to_plus) w -= lam.axis() * (2.0 * c);
      if (!to_plus && dot(w, lam.axis()) >= 0.0) w = -lam.axis();
      return w;
    }
    case SphericalDensity::Kind::Tabulated: {
      const double envelope = lam.max_value();
      for (;;) {
        Vec w = uniform_on_sphere(d, rng);
        if (rng.uniform() * envelope < lam(w)) return w;
      }
    }
  }
  return uniform_on_sphere(d, rng);
}

double sample_increment_1d_exact(double alpha, double c_minus, double c_plus, double t, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0)) fail(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 2)");
  if (!(c_minus >= 0.0 && c_plus >= 0.0 && c_minus + c_plus > 0.0))
    fail(ErrorCode::InvalidArgument, "jump intensities must be nonnegative and not both zero");
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  const double v = pi * (rng.uniform() - 0.5);
  const double w = standard_exponential(rng);
  const double c = c_plus + c_minus;
  if (alpha == 1.0) {
    if (std::abs(c_plus - c_minus) > 1e-12 * c)
      fail(ErrorCode::AlphaOneAsymmetric, "alpha = 1 needs c_plus == c_minus");
    // Cauchy with Levy density (c/2)|z|^{-2} on each side has scale pi c / 2.
    return pi * (c / 2.0) * std::tan(v) * t;
  }
  const double skew = (c_plus - c_minus) / c;
  const double tan_half = std::tan(pi * alpha / 2.0);
  const double b = std::atan(skew * tan_half) / alpha;
  const double s = std::pow(1.0 + skew * skew * tan_half * tan_half, 1.0 / (2.0 * alpha));
  const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  // sigma^alpha = -c Gamma(-alpha) cos(pi alpha / 2) > 0 on (0, 1) and (1, 2).
  const double scale = std::pow(-c * std::tgamma(-alpha) * std::cos(pi * alpha / 2.0), 1.0 / alpha);
  return scale * std::pow(t, 1.0 / alpha) * x;
}

PathSimulator::PathSimulator(const StableModel& model, const SchemeParams& scheme)
    : model_(model), scheme_(scheme), drift_(model.dim()) {
  validate_scheme(model, scheme);
  const double a = model.alpha();
  jump_rate_ = model.big_jump_rate(scheme.eps);
  const bool gaussian = scheme.small_jump_mode == SmallJumpMode::GaussianSurrogate;
  // Strict stability pins the compensation: none of the big jumps below one,
  // their full mean above one. Below one the surrogate also restores the mean
  // of the dropped small jumps.
  if (a > 1.0) drift_ = -model.big_jump_mean(scheme.eps);
  else if (a < 1.0 && gaussian) drift_ = model.small_jump_mean(scheme.eps);
  has_drift_ = norm(drift_) > 0.0;
  if (gaussian) {
    chol_ = cholesky(model.small_jump_covariance(scheme.eps), model.dim());
    has_gaussian_ = true;
  }
}

Vec PathSimulator::big_jump(Rng& rng) const {
  const Vec w = sample_direction(model_, rng);
  const double r = scheme_.eps * std::exp(-std::log(rng.uniform()) / model_.alpha());
  return w * r;
}

Vec PathSimulator::gaussian(double t, Rng& rng) const {
  const int d = model_.dim();
  std::array<double, kMaxDim> z{};
  for (int i = 0; i < d; ++i) z[i] = standard_normal(rng);
  Vec g(d);
  const double s = std::sqrt(t);
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int k = 0; k <= i; ++k) acc += chol_[i][k] * z[k];
    g[i] = acc * s;
  }
  return g;
}

Vec PathSimulator::increment(double t, Rng& rng) const {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  const double mean = jump_rate_ * t;
  const long count = std::poisson_distribution<long>(mean)(rng);
  const double steps = std::max(1.0, std::ceil(t / scheme_.delta));
  if (static_cast<double>(count) > static_cast<double>(scheme_.max_jumps_per_step) * steps)
    fail(ErrorCode::JumpCapExceeded, "jump cap exceeded; eps is too small for t");
  Vec x = drift_ * t;
  for (long k = 0; k < count; ++k) x += big_jump(rng);
  if (has_gaussian_) x += gaussian(t, rng);
  return x;
}

ExitRecord PathSimulator::run(const ConeDomain& domain, const Vec& x0, double t_max, Rng& rng,
                              std::span<const double> observe_times, std::span<Vec> observed) const {
  if (x0.dim() != model_.dim() || domain.dim() != model_.dim())
    fail(ErrorCode::InvalidArgument, "start point, domain and model dimensions differ");
  if (!(t_max > 0.0)) fail(ErrorCode::InvalidArgument, "t_max must be positive");
  if (!domain.contains(x0)) fail(ErrorCode::InvalidArgument, "start point lies outside the domain");

  ExitRecord rec;
  rec.start = x0;
  Vec pos = x0;
  double t = 0.0;
  double next_jump = jump_rate_ > 0.0 ? standard_exponential(rng) / jump_rate_ : t_max * 2.0 + 1.0;
  std::size_t obs = 0;
  long grid_index = 0;

  const auto exit_at = [&](double time, const Vec& pre, const Vec& post, ExitKind kind) {
    rec.survived = false;
    rec.exit_time = time;
    rec.pre_exit = pre;
    rec.post_exit = post;
    rec.exit_kind = kind;
    return rec;
  };

  // Moves pos along the drift to time `until`; returns the crossing
  // parameter when the straight segment leaves the domain.
  const auto drift_to = [&](double until, Vec& out) -> std::optional<double> {
    out = pos + drift_ * (until - t);
    if (!has_drift_) return std::nullopt;
    if (domain.convex() && domain.contains(out)) return std::nullopt;
    return domain.segment_exit(pos, out);
  };

  while (t < t_max) {
    const double grid_next = std::min(t_max, static_cast<double>(grid_index + 1) * scheme_.delta);
    double step_end = grid_next;
    bool is_obs = false;
    if (obs < observe_times.size() && observe_times[obs] <= step_end) {
      step_end = std::max(observe_times[obs], t);
      is_obs = true;
    }
    if (step_end >= grid_next) ++grid_index;
    const double step_start = t;

    long jumps = 0;
    while (next_jump <= step_end) {
      if (++jumps > scheme_.max_jumps_per_step)
        fail(ErrorCode::JumpCapExceeded, "jump cap exceeded; eps is too small for delta");
      Vec pre(model_.dim());
      if (auto s = drift_to(next_jump, pre)) {
        const Vec hit = pos + (pre - pos) * *s;
        return exit_at(t + *s * (next_jump - t), hit, hit, ExitKind::SkeletonCrossing);
      }
      const Vec post = pre + big_jump(rng);
      ++rec.jumps;
      if (!domain.contains(post)) return exit_at(next_jump, pre, post, ExitKind::Jump);
      pos = post;
      t = next_jump;
      next_jump += standard_exponential(rng) / jump_rate_;
    }

    Vec end(model_.dim());
    if (auto s = drift_to(step_end, end)) {
      const Vec hit = pos + (end - pos) * *s;
      return exit_at(t + *s * (step_end - t), hit, hit, ExitKind::SkeletonCrossing);
    }
    if (has_gaussian_ && step_end > step_start) {
      const Vec post = end + gaussian(step_end - step_start, rng);
      // The crossing happened somewhere after the last event; dating it at the
      // midpoint keeps exit_time < t_max for every killed path.
      if (!domain.contains(post))
        return exit_at(t + 0.5 * (step_end - t), end, post, ExitKind::SkeletonCrossing);
      end = post;
    }
    pos = end;
    t = step_end;
    if (is_obs) {
      while (obs < observe_times.size() && observe_times[obs] <= t) {
        if (obs < observed.size()) observed[obs] = pos;
        ++obs;
      }
    }
  }
  rec.survived = true;
  rec.exit_time = t_max;
  rec.pre_exit = pos;
  rec.post_exit = pos;
  rec.exit_kind = ExitKind::Censored;
  return rec;
}

Vec sample_increment(const StableModel& model, double t, const SchemeParams& scheme, Rng& rng) {
  return PathSimulator(model, scheme).increment(t, rng);
}

ExitRecord sample_path_exit(const StableModel& model, const ConeDomain& domain, const Vec& x0,
                            double t_max, const SchemeParams& scheme, Rng& rng) {
  return PathSimulator(model, scheme).run(domain, x0, t_max, rng);
}

std::vector<ExitRecord> simulate_exits(const StableModel& model, const ConeDomain& domain,
                                       const Vec& x0, double t_max, const SchemeParams& scheme,
                                       std::size_t n, const RunContext& ctx) {
  const PathSimulator sim(model, scheme);
  auto parts = run_batches(n, ctx.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<ExitRecord> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = path_rng(ctx, i);
      out.push_back(sim.run(domain, x0, t_max, rng));
    }
    return out;
  });
  std::vector<ExitRecord> all;
  all.reserve(n);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

SnapshotRun simulate_snapshots(const StableModel& model, const ConeDomain& domain, const Vec& x0,
                               std::span<const double> observe_times, const SchemeParams& scheme,
                               std::size_t n, const RunContext& ctx) {
  if (observe_times.empty()) fail(ErrorCode::InvalidArgument, "need at least one observation time");
  if (!std::is_sorted(observe_times.begin(), observe_times.end()) || !(observe_times.front() > 0.0))
    fail(ErrorCode::InvalidArgument, "observation times must be positive and sorted");
  const double t_max = observe_times.back();
  const std::size_t m = observe_times.size();
  const PathSimulator sim(model, scheme);
  struct Part {
    std::vector<ExitRecord> records;
    std::vector<std::vector<Vec>> alive;
  };
  auto parts = run_batches(n, ctx.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    Part part;
    part.records.reserve(end - begin);
    part.alive.resize(m);
    std::vector<Vec> seen(m);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = path_rng(ctx, i);
      ExitRecord rec = sim.run(domain, x0, t_max, rng, observe_times, seen);
      for (std::size_t k = 0; k < m; ++k) {
        const bool alive = rec.survived || rec.exit_time > observe_times[k];
        if (alive) part.alive[k].push_back(seen[k]);
      }
      part.records.push_back(rec);
    }
    return part;
  });
  SnapshotRun run;
  run.records.reserve(n);
  run.alive_positions.resize(m);
  for (auto& p : parts) {
    run.records.insert(run.records.end(), p.records.begin(), p.records.end());
    for (std::size_t k = 0; k < m; ++k)
      run.alive_positions[k].insert(run.alive_positions[k].end(), p.alive[k].begin(), p.alive[k].end());
  }
  return run;
}

std::vector<Vec> simulate_increments(const StableModel& model, double t, const SchemeParams& scheme,
                                     std::size_t n, const RunContext& ctx) {
  const PathSimulator sim(model, scheme);
  auto parts = run_batches(n, ctx.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<Vec> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = path_rng(ctx, i);
      out.push_back(sim.increment(t, rng));
    }
    return out;
  });
  std::vector<Vec> all;
  all.reserve(n);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

std::vector<double> simulate_increments_1d_exact(double alpha, double c_minus, double c_plus, double t,
                                                 std::size_t n, const RunContext& ctx) {
  auto parts = run_batches(n, ctx.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = path_rng(ctx, i);
      out.push_back(sample_increment_1d_exact(alpha, c_minus, c_plus, t, rng));
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(n);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

BiasProbeReport scheme_bias_probe(const StableModel& model, const SchemeParams& scheme,
                                  std::size_t n, const RunContext& ctx) {
  constexpr double kScaleTime = 4.0;
  constexpr double kPassLevel = 0.01;
  const double a = model.alpha();
  const Vec e1 = Vec::unit(model.dim(), 0);

  const auto first_coord = [](const std::vector<Vec>& v, double factor) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i][0] * factor;
    return out;
  };
  const auto x1 = first_coord(simulate_increments(model, 1.0, scheme, n, ctx.with_stream(1)), 1.0);
  const auto xt = first_coord(simulate_increments(model, kScaleTime, scheme, n, ctx.with_stream(2)),
                              std::pow(kScaleTime, -1.0 / a));

  BiasProbeReport rep;
  const KsResult scaling = ks_two_sample(x1, xt);
  rep.scaling_ks = scaling.statistic;
  rep.scaling_p = scaling.p_value;

  const ProjectionCoeffs pc = projection_coefficients(model, e1);
  const bool oracle_defined = a != 1.0 || std::abs(pc.c_plus - pc.c_minus) <= 1e-9 * (pc.c_plus + pc.c_minus);
  if (oracle_defined) {
    const double cm = a == 1.0 ? 0.5 * (pc.c_plus + pc.c_minus) : pc.c_minus;
    const double cp = a == 1.0 ? cm : pc.c_plus;
    const auto exact = simulate_increments_1d_exact(a, cm, cp, 1.0, n, ctx.with_stream(3));
    const KsResult oracle = ks_two_sample(x1, exact);
    rep.oracle_ks = oracle.statistic;
    rep.oracle_p = oracle.p_value;
  } else {
    rep.oracle_p = 1.0;
  }
  rep.passed = rep.scaling_p > kPassLevel && rep.oracle_p > kPassLevel;
  rep.suggested_eps = rep.passed ? scheme.eps : scheme.eps / 10.0;
  rep.suggested_delta = rep.passed ? scheme.delta : scheme.delta / 2.0;
  return rep;
}

}  // namespace anisotable
