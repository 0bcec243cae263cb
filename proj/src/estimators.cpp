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

#include "anisotable/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "anisotable/error.hpp"
#include "anisotable/kernels.hpp"
#include "anisotable/stats.hpp"

namespace anisotable {
namespace {

using std::numbers::pi;

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kBootstrapTag = 0xB0075712A9ULL;

SchemeParams scheme_for(const StableModel& model, double t_max, const EstimatorOptions& opt) {
  return opt.scheme ? *opt.scheme : SchemeParams::defaults(model, t_max);
}

Rng bootstrap_rng(const EstimatorOptions& opt, std::uint64_t salt) {
  return Rng(hash_combine(batch_seed(opt.run, 0), kBootstrapTag), salt);
}

void require_positive_n(std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "n must be at least 1");
}

void require_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) fail(ErrorCode::DegenerateGrid, std::string(what) + " is empty");
  for (double v : grid)
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::DegenerateGrid, std::string(what) + " must be positive");
}

// Effective exit times with survivors at +infinity, so alive(t) = #{> t}
// holds for every t up to the horizon.
std::vector<double> effective_exit_times(std::span<const ExitRecord> records) {
  std::vector<double> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    out[i] = records[i].survived ? std::numeric_limits<double>::infinity() : records[i].exit_time;
  return out;
}

struct LogFit {
  LinearFit line;
  std::vector<bool> used;
};

double log_weight(double alive, double n) {
  const double p = alive / n;
  const double q = std::max(1.0 - p, 0.5 / n);
  return n * p / q;
}

// WLS of log(alive / n) on log(abscissa) over points with alive >= min_count.
LogFit fit_loglog(std::span<const double> abscissa, std::span<const double> alive, std::span<const double> n,
                  double min_count) {
  LogFit fit;
  fit.used.assign(abscissa.size(), false);
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (alive[i] < min_count || alive[i] <= 0.0) continue;
    fit.used[i] = true;
    x.push_back(std::log(abscissa[i]));
    y.push_back(std::log(alive[i] / n[i]));
    w.push_back(log_weight(alive[i], n[i]));
  }
  if (x.size() < 3) fail(ErrorCode::DegenerateGrid, "fewer than three usable survival points");
  fit.line = weighted_least_squares(x, y, w);
  return fit;
}

// Slope of the fit restricted to a fixed set of points; NaN when a
// resample leaves fewer than two positive points.
double refit_slope(std::span<const double> abscissa, std::span<const double> alive, std::span<const double> n,
                   const std::vector<bool>& used) {
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (!used[i] || alive[i] <= 0.0) continue;
    x.push_back(std::log(abscissa[i]));
    y.push_back(std::log(alive[i] / n[i]));
    w.push_back(log_weight(alive[i], n[i]));
  }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return weighted_least_squares(x, y, w).slope;
}

EstimateCI summarize_bootstrap(double value, std::vector<double> draws, std::size_t n, std::string method) {
  std::erase_if(draws, [](double v) { return !std::isfinite(v); });
  EstimateCI e;
  e.value = value;
  e.n = n;
  e.method = std::move(method);
  if (draws.size() < 2) {
    e.std_error = std::numeric_limits<double>::infinity();
    e.ci_lo = -std::numeric_limits<double>::infinity();
    e.ci_hi = std::numeric_limits<double>::infinity();
    return e;
  }
  std::sort(draws.begin(), draws.end());
  e.std_error = sample_sd(draws);
  e.ci_lo = quantile_sorted(draws, 0.025);
  e.ci_hi = quantile_sorted(draws, 0.975);
  return e;
}

// Coordinates split into contiguous arrays for the kernel sums.
struct KdeSamples {
  int dim = 1;
  std::vector<double> x;
  std::vector<double> y;

  explicit KdeSamples(std::span<const Vec> pts, const Vec& shift) {
    if (pts.empty()) return;
    dim = pts.front().dim();
    if (dim > 2) fail(ErrorCode::UnsupportedDimension, "kernel densities are limited to d <= 2");
    x.reserve(pts.size());
    if (dim == 2) y.reserve(pts.size());
    for (const Vec& p : pts) {
      x.push_back(p[0] + shift[0]);
      if (dim == 2) y.push_back(p[1] + shift[1]);
    }
  }

  double density(const Vec& at, double h, std::size_t total) const {
    if (x.empty()) return 0.0;
    const double inv_h = 1.0 / h;
    if (dim == 1)
      return kernels::gaussian_sum_1d(x, at[0], inv_h) / (static_cast<double>(total) * h * std::sqrt(2.0 * pi));
    return kernels::gaussian_sum_2d(x, y, at[0], at[1], inv_h) / (static_cast<double>(total) * h * h * 2.0 * pi);
  }
};

std::vector<Vec> survivor_positions(std::span<const ExitRecord> records) {
  std::vector<Vec> out;
  for (const ExitRecord& r : records)
    if (r.survived) out.push_back(r.post_exit);
  return out;
}

bool is_half_line_or_half_space(const ConeDomain& domain) {
  using K = ConeDomain::Kind;
  if (domain.kind() == K::HalfSpace) return true;
  return domain.kind() == K::CircularCone && domain.dim() == 1;
}

}  // namespace

EstimateCI bernoulli_estimate(std::size_t successes, std::size_t n) {
  require_positive_n(n);
  EstimateCI e;
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  e.value = p;
  e.n = n;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  e.method = "bernoulli";
  e.ci_lo = std::max(0.0, p - kZ95 * e.std_error);
  e.ci_hi = std::min(1.0, p + kZ95 * e.std_error);
  return e;
}

// ---------------------------------------------------------------------------
// Binning

std::size_t BinSpec::total_bins() const {
  std::size_t total = 1;
  for (int b : bins) total *= static_cast<std::size_t>(b);
  return total;
}

std::size_t BinSpec::index_of(const Vec& x) const {
  std::size_t flat = 0;
  for (int i = 0; i < dim(); ++i) {
    const double f = (x[i] - lo[i]) / (hi[i] - lo[i]);
    const long k = std::clamp(static_cast<long>(std::floor(f * bins[i])), 0L, static_cast<long>(bins[i] - 1));
    flat = flat * static_cast<std::size_t>(bins[i]) + static_cast<std::size_t>(k);
  }
  return flat;
}

std::pair<Vec, Vec> BinSpec::bounds(std::size_t flat) const {
  Vec a(dim()), b(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    const auto k = static_cast<double>(flat % static_cast<std::size_t>(bins[i]));
    flat /= static_cast<std::size_t>(bins[i]);
    const double w = (hi[i] - lo[i]) / bins[i];
    a[i] = lo[i] + k * w;
    b[i] = lo[i] + (k + 1.0) * w;
  }
  return {a, b};
}

EmpiricalMeasure histogram(const BinSpec& spec, std::span<const Vec> points, double scale) {
  if (static_cast<int>(spec.bins.size()) != spec.dim() || spec.hi.dim() != spec.dim())
    fail(ErrorCode::InvalidArgument, "bin specification dimensions differ");
  for (int i = 0; i < spec.dim(); ++i)
    if (spec.bins[i] < 1 || !(spec.hi[i] > spec.lo[i]))
      fail(ErrorCode::InvalidArgument, "bins need a positive count and hi > lo");
  EmpiricalMeasure m;
  m.binning = spec;
  m.counts.assign(spec.total_bins(), 0.0);
  for (const Vec& p : points) m.counts[spec.index_of(p * scale)] += 1.0;
  m.samples = points.size();
  m.masses.assign(m.counts.size(), 0.0);
  if (m.samples > 0)
    for (std::size_t k = 0; k < m.counts.size(); ++k) m.masses[k] = m.counts[k] / static_cast<double>(m.samples);
  return m;
}

// ---------------------------------------------------------------------------
// Survival

EstimateCI survival_probability(const StableModel& model, const ConeDomain& domain, const Vec& x, double t,
                                std::size_t n, const EstimatorOptions& opt) {
  require_positive_n(n);
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  if (!domain.contains(x)) fail(ErrorCode::InvalidArgument, "start point lies outside the domain");
  if (domain.kind() == ConeDomain::Kind::FullSpace) return bernoulli_estimate(n, n);
  const auto recs = simulate_exits(model, domain, x, t, scheme_for(model, t, opt), n, opt.run);
  std::size_t alive = 0;
  for (const auto& r : recs) alive += r.survived ? 1 : 0;
  return bernoulli_estimate(alive, n);
}

std::vector<EstimateCI> SurvivalCurve::estimates() const {
  std::vector<EstimateCI> out;
  out.reserve(times.size());
  for (std::size_t a : alive) out.push_back(bernoulli_estimate(a, n));
  return out;
}

SurvivalCurve survival_curve_from_records(std::span<const ExitRecord> records, std::span<const double> t_grid) {
  SurvivalCurve c;
  c.times.assign(t_grid.begin(), t_grid.end());
  c.n = records.size();
  const auto eff = effective_exit_times(records);
  for (double t : t_grid) c.alive.push_back(kernels::count_greater(eff, t));
  return c;
}

SurvivalCurve survival_curve(const StableModel& model, const ConeDomain& domain, const Vec& x,
                             std::span<const double> t_grid, std::size_t n, const EstimatorOptions& opt) {
  require_positive_n(n);
  require_grid(t_grid, "time grid");
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  if (domain.kind() == ConeDomain::Kind::FullSpace) {
    SurvivalCurve c;
    c.times.assign(t_grid.begin(), t_grid.end());
    c.n = n;
    c.alive.assign(t_grid.size(), n);
    return c;
  }
  const auto recs = simulate_exits(model, domain, x, t_max, scheme_for(model, t_max, opt), n, opt.run);
  return survival_curve_from_records(recs, t_grid);
}

ExponentFit survival_exponent_time(const StableModel& model, const ConeDomain& domain, const Vec& x,
                                   std::span<const double> t_grid, std::size_t n, const EstimatorOptions& opt) {
  std::vector<double> times(t_grid.begin(), t_grid.end());
  std::sort(times.begin(), times.end());
  const SurvivalCurve curve = survival_curve(model, domain, x, times, n, opt);
  const std::size_t m = times.size();
  std::vector<double> alive(m), total(m, static_cast<double>(n));
  for (std::size_t i = 0; i < m; ++i) alive[i] = static_cast<double>(curve.alive[i]);

  ExponentFit out;
  out.abscissa = times;
  out.survival = curve.estimates();
  const LogFit fit = fit_loglog(times, alive, total, opt.min_count);
  out.used = fit.used;
  out.intercept = fit.line.intercept;

  // Resampling paths only moves counts between the cells
  // [0, t_1], (t_1, t_2], ..., (t_m, inf): a multinomial draw.
  std::vector<double> cells(m + 1);
  cells[0] = static_cast<double>(n) - alive[0];
  for (std::size_t i = 1; i < m; ++i) cells[i] = alive[i - 1] - alive[i];
  cells[m] = alive[m - 1];
  Rng rng = bootstrap_rng(opt, 1);
  std::vector<double> draws;
  draws.reserve(opt.bootstrap_resamples);
  std::vector<double> boot(m);
  for (std::size_t b = 0; b < opt.bootstrap_resamples; ++b) {
    double left = static_cast<double>(n);
    double mass = static_cast<double>(n);
    std::vector<double> k(m + 1, 0.0);
    for (std::size_t c = 0; c <= m && left > 0.0; ++c) {
      if (c == m || mass <= cells[c]) {
        k[c] = left;
        break;
      }
      const double p = cells[c] / mass;
      k[c] = static_cast<double>(std::binomial_distribution<long>(static_cast<long>(left), p)(rng));
      left -= k[c];
      mass -= cells[c];
    }
    double acc = 0.0;
    for (std::size_t i = m; i-- > 0;) {
      acc += k[i + 1];
      boot[i] = acc;
    }
    draws.push_back(-refit_slope(times, boot, total, fit.used));
  }
  out.estimate = summarize_bootstrap(-fit.line.slope, std::move(draws), n, "wls_time_bootstrap");
  return out;
}

ExponentFit survival_exponent_space(const StableModel& model, const ConeDomain& domain, const Vec& direction,
                                    std::span<const double> s_grid, double t, std::size_t n,
                                    const EstimatorOptions& opt) {
  require_positive_n(n);
  require_grid(s_grid, "radius grid");
  std::vector<double> radii(s_grid.begin(), s_grid.end());
  std::sort(radii.begin(), radii.end());
  const Vec u = normalized(direction);
  const SchemeParams scheme = scheme_for(model, t, opt);
  const std::size_t m = radii.size();
  std::vector<double> alive(m), total(m, static_cast<double>(n));
  ExponentFit out;
  out.abscissa = radii;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec x = u * radii[i];
    if (!domain.contains(x)) fail(ErrorCode::InvalidArgument, "radius grid leaves the domain along the direction");
    std::size_t a = n;
    if (domain.kind() != ConeDomain::Kind::FullSpace) {
      const auto recs = simulate_exits(model, domain, x, t, scheme, n, opt.run.with_stream(1000 + i));
      a = static_cast<std::size_t>(std::count_if(recs.begin(), recs.end(), [](const ExitRecord& r) { return r.survived; }));
    }
    alive[i] = static_cast<double>(a);
    out.survival.push_back(bernoulli_estimate(a, n));
  }
  if (std::all_of(alive.begin(), alive.end(), [&](double a) { return a < opt.min_count; }))
    fail(ErrorCode::AllPathsDied, "no radius keeps enough survivors; shrink t");
  const LogFit fit = fit_loglog(radii, alive, total, opt.min_count);
  out.used = fit.used;
  out.intercept = fit.line.intercept;

  Rng rng = bootstrap_rng(opt, 2);
  std::vector<double> draws;
  std::vector<double> boot(m);
  for (std::size_t b = 0; b < opt.bootstrap_resamples; ++b) {
    for (std::size_t i = 0; i < m; ++i)
      boot[i] = static_cast<double>(std::binomial_distribution<long>(static_cast<long>(n), alive[i] / total[i])(rng));
    draws.push_back(refit_slope(radii, boot, total, fit.used));
  }
  out.estimate = summarize_bootstrap(fit.line.slope, std::move(draws), n, "wls_space_bootstrap");
  return out;
}

EstimateCI sign_frequency(const StableModel& model, const Vec& direction, std::size_t n,
                          const EstimatorOptions& opt) {
  require_positive_n(n);
  const Vec u = normalized(direction);
  const ProjectionCoeffs pc = projection_coefficients(model, u);
  const double a = model.alpha();
  const bool exact = a != 1.0 || std::abs(pc.c_plus - pc.c_minus) <= 1e-9 * (pc.c_plus + pc.c_minus);
  std::size_t positive = 0;
  if (exact) {
    const double cm = a == 1.0 ? 0.5 * (pc.c_plus + pc.c_minus) : pc.c_minus;
    const double cp = a == 1.0 ? cm : pc.c_plus;
    const auto y = simulate_increments_1d_exact(a, cm, cp, 1.0, n, opt.run);
    positive = kernels::count_greater(y, 0.0);
  } else {
    const auto xs = simulate_increments(model, 1.0, scheme_for(model, 1.0, opt), n, opt.run);
    for (const Vec& v : xs) positive += dot(v, u) > 0.0 ? 1 : 0;
  }
  EstimateCI e = bernoulli_estimate(positive, n);
  e.method = exact ? "sign_exact_1d" : "sign_scheme";
  return e;
}

// ---------------------------------------------------------------------------
// Densities

double default_bandwidth(std::span<const Vec> samples) {
  if (samples.size() < 2) fail(ErrorCode::InvalidArgument, "bandwidth needs at least two samples");
  const int d = samples.front().dim();
  double h = 0.0;
  std::vector<double> c(samples.size());
  for (int i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < samples.size(); ++k) c[k] = samples[k][i];
    h += silverman_bandwidth(c);
  }
  h /= d;
  // Silverman's rule is tuned for d = 1; the d-dimensional rate is n^{-1/(d+4)}.
  return h * std::pow(static_cast<double>(samples.size()), 0.2 - 1.0 / (d + 4.0));
}

double kde_at(std::span<const Vec> samples, const Vec& at, double bandwidth, std::size_t total) {
  if (!(bandwidth > 0.0)) fail(ErrorCode::InvalidArgument, "bandwidth must be positive");
  return KdeSamples(samples, Vec(at.dim())).density(at, bandwidth, total);
}

HeatKernelReport heat_kernel_density(const StableModel& model, double t, std::span<const Vec> points,
                                     std::size_t n, std::optional<double> bandwidth,
                                     const EstimatorOptions& opt) {
  if (n < 10000) fail(ErrorCode::InvalidArgument, "heat kernel estimates need n >= 10^4");
  if (model.dim() > 2) fail(ErrorCode::UnsupportedDimension, "kernel densities are limited to d <= 2");
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  const auto xs = simulate_increments(model, t, scheme_for(model, t, opt), n, opt.run);
  HeatKernelReport rep;
  rep.bandwidth = bandwidth ? *bandwidth : default_bandwidth(xs);
  if (!(rep.bandwidth > 0.0)) fail(ErrorCode::InvalidArgument, "bandwidth must be positive");
  const KdeSamples kde(xs, Vec(model.dim()));
  const double d = model.dim();
  const double a = model.alpha();
  rep.constant = 1.0;
  for (const Vec& p : points) {
    const double r = norm(p);
    const double env = r > 0.0 ? std::min(std::pow(t, -d / a), t * std::pow(r, -d - a)) : std::pow(t, -d / a);
    const double val = kde.density(p, rep.bandwidth, n);
    rep.density.push_back(val);
    rep.envelope.push_back(env);
    const double ratio = val / env;
    rep.constant = std::max(rep.constant, ratio > 0.0 ? std::max(ratio, 1.0 / ratio)
                                                      : std::numeric_limits<double>::infinity());
  }
  return rep;
}

FactorizationTable factorization_ratio(const StableModel& model, const ConeDomain& domain,
                                       std::span<const Vec> x_list, std::span<const Vec> y_list, double t,
                                       std::size_t n, std::optional<double> bandwidth,
                                       const EstimatorOptions& opt) {
  constexpr std::size_t kMinSurvivors = 500;
  require_positive_n(n);
  if (model.dim() > 2) fail(ErrorCode::UnsupportedDimension, "factorization ratios are limited to d <= 2");
  if (x_list.empty() || y_list.empty()) fail(ErrorCode::DegenerateGrid, "point lists must be nonempty");
  for (const Vec& v : x_list)
    if (!domain.contains(v)) fail(ErrorCode::InvalidArgument, "x point lies outside the domain");
  for (const Vec& v : y_list)
    if (!domain.contains(v)) fail(ErrorCode::InvalidArgument, "y point lies outside the domain");
  const SchemeParams scheme = scheme_for(model, t, opt);
  const StableModel hat = dual(model);

  FactorizationTable tab;
  tab.rows = x_list.size();
  tab.cols = y_list.size();
  const auto free = simulate_increments(model, t, scheme, n, opt.run.with_stream(300));
  tab.bandwidth = bandwidth ? *bandwidth : default_bandwidth(free);
  const double h = tab.bandwidth;
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "bandwidth must be positive");
  const KdeSamples free_kde(free, Vec(model.dim()));

  for (std::size_t j = 0; j < tab.cols; ++j) {
    const auto recs = simulate_exits(hat, domain, y_list[j], t, scheme, n, opt.run.with_stream(200 + j));
    const auto alive = static_cast<std::size_t>(
        std::count_if(recs.begin(), recs.end(), [](const ExitRecord& r) { return r.survived; }));
    tab.survival_y.push_back(bernoulli_estimate(alive, n));
  }
  for (std::size_t i = 0; i < tab.rows; ++i) {
    const auto recs = simulate_exits(model, domain, x_list[i], t, scheme, n, opt.run.with_stream(100 + i));
    const auto ends = survivor_positions(recs);
    if (ends.size() < kMinSurvivors)
      fail(ErrorCode::TooFewSurvivors, "fewer than 500 surviving paths from an x point");
    tab.survival_x.push_back(bernoulli_estimate(ends.size(), n));
    const KdeSamples killed(ends, Vec(model.dim()));
    for (std::size_t j = 0; j < tab.cols; ++j) {
      const double pd = killed.density(y_list[j], h, n);
      const double pf = free_kde.density(y_list[j] - x_list[i], h, n);
      const double denom = tab.survival_x[i].value * pf * tab.survival_y[j].value;
      tab.killed_density.push_back(pd);
      tab.free_density.push_back(pf);
      tab.ratio.push_back(denom > 0.0 ? pd / denom : std::numeric_limits<double>::infinity());
    }
  }
  const auto [lo, hi] = std::minmax_element(tab.ratio.begin(), tab.ratio.end());
  tab.spread = (*lo > 0.0 && std::isfinite(*hi)) ? *hi / *lo : std::numeric_limits<double>::infinity();
  return tab;
}

// ---------------------------------------------------------------------------
// Exit laws

OvershootReport overshoot_from_records(const StableModel& model, const ConeDomain& domain,
                                       std::span<const ExitRecord> records, const OvershootBins& bins,
                                       double min_u) {
  if (model.dim() != 1 || !is_half_line_or_half_space(domain))
    fail(ErrorCode::InvalidArgument, "the overshoot oracle covers half-lines in d = 1");
  if (bins.v_bins < 2 || bins.u_bins < 1) fail(ErrorCode::InvalidArgument, "need u_bins >= 1 and v_bins >= 2");
  const double a = model.alpha();
  const Vec axis = domain.reference_direction();
  std::vector<double> us, vs;
  for (const ExitRecord& r : records) {
    if (r.exit_kind != ExitKind::Jump) continue;
    const double u = dot(r.pre_exit, axis);
    const double jump = u - dot(r.post_exit, axis);
    if (!(u > min_u) || !(jump >= u)) continue;
    us.push_back(u);
    vs.push_back(std::pow(u / jump, a));
  }
  OvershootReport rep;
  rep.jump_exits = us.size();
  if (us.size() < static_cast<std::size_t>(bins.u_bins) * 50)
    fail(ErrorCode::TooFewSurvivors, "too few jump exits for the overshoot check");

  rep.u_edges = bins.u_edges;
  if (rep.u_edges.empty()) {
    std::vector<double> sorted = us;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k <= bins.u_bins; ++k)
      rep.u_edges.push_back(quantile_sorted(sorted, static_cast<double>(k) / bins.u_bins));
  }
  if (rep.u_edges.size() < 2 || !std::is_sorted(rep.u_edges.begin(), rep.u_edges.end()))
    fail(ErrorCode::InvalidArgument, "u edges must be sorted with at least two entries");
  const std::size_t nb = rep.u_edges.size() - 1;
  std::vector<std::vector<double>> hist(nb, std::vector<double>(static_cast<std::size_t>(bins.v_bins), 0.0));
  rep.counts.assign(nb, 0);
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (us[i] < rep.u_edges.front() || us[i] > rep.u_edges.back()) continue;
    const auto it = std::upper_bound(rep.u_edges.begin(), rep.u_edges.end(), us[i]);
    const std::size_t b = std::min<std::size_t>(nb - 1, static_cast<std::size_t>(it - rep.u_edges.begin()) - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(vs[i] * bins.v_bins), bins.v_bins - 1);
    hist[b][k] += 1.0;
    ++rep.counts[b];
  }
  const std::vector<double> uniform(static_cast<std::size_t>(bins.v_bins), 1.0 / bins.v_bins);
  double weighted = 0.0;
  std::size_t total = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    if (rep.counts[b] == 0) {
      rep.tv.push_back(0.0);
      continue;
    }
    const double tv = tv_to_reference(hist[b], uniform);
    rep.tv.push_back(tv);
    weighted += tv * static_cast<double>(rep.counts[b]);
    total += rep.counts[b];
  }
  rep.aggregate_tv = total > 0 ? weighted / static_cast<double>(total) : 1.0;
  return rep;
}

OvershootReport overshoot_conditional_check(const StableModel& model, const ConeDomain& domain, const Vec& x,
                                            double t_max, std::size_t n, const OvershootBins& bins,
                                            const EstimatorOptions& opt) {
  require_positive_n(n);
  const SchemeParams scheme = scheme_for(model, t_max, opt);
  const auto recs = simulate_exits(model, domain, x, t_max, scheme, n, opt.run);
  // Below eps the scheme has no jumps shorter than the gap, so the
  // conditional law there is a scheme artefact.
  return overshoot_from_records(model, domain, recs, bins, scheme.eps);
}

// ---------------------------------------------------------------------------
// Yaglom

EmpiricalMeasure yaglom_histogram(const StableModel& model, const ConeDomain& domain, const Vec& start, double t,
                                  std::size_t n, const BinSpec& bins, const EstimatorOptions& opt) {
  require_positive_n(n);
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  const auto recs = simulate_exits(model, domain, start, t, scheme_for(model, t, opt), n, opt.run);
  const auto ends = survivor_positions(recs);
  if (ends.empty()) fail(ErrorCode::TooFewSurvivors, "no path survives to t");
  return histogram(bins, ends, std::pow(t, -1.0 / model.alpha()));
}

YaglomTable yaglom_convergence(const StableModel& model, const ConeDomain& domain,
                               std::span<const Vec> start_list, std::span<const double> t_grid, std::size_t n,
                               const BinSpec& bins, const EstimatorOptions& opt) {
  require_positive_n(n);
  require_grid(t_grid, "time grid");
  if (start_list.empty()) fail(ErrorCode::DegenerateGrid, "start list is empty");
  YaglomTable tab;
  tab.times.assign(t_grid.begin(), t_grid.end());
  std::sort(tab.times.begin(), tab.times.end());
  const SchemeParams scheme = scheme_for(model, tab.times.back(), opt);
  for (std::size_t s = 0; s < start_list.size(); ++s) {
    const SnapshotRun run = simulate_snapshots(model, domain, start_list[s], tab.times, scheme, n,
                                               opt.run.with_stream(500 + s));
    std::vector<EmpiricalMeasure> row;
    for (std::size_t k = 0; k < tab.times.size(); ++k) {
      if (run.alive_positions[k].empty()) fail(ErrorCode::TooFewSurvivors, "no path survives to an observation time");
      row.push_back(histogram(bins, run.alive_positions[k], std::pow(tab.times[k], -1.0 / model.alpha())));
    }
    std::vector<double> tv;
    for (std::size_t k = 1; k < row.size(); ++k) tv.push_back(tv_distance(row[k - 1].counts, row[k].counts));
    tab.tv_consecutive.push_back(std::move(tv));
    tab.histograms.push_back(std::move(row));
  }
  for (std::size_t s = 0; s < tab.histograms.size(); ++s)
    tab.tv_across_starts.push_back(
        s == 0 ? 0.0 : tv_distance(tab.histograms[0].back().counts, tab.histograms[s].back().counts));
  return tab;
}

// ---------------------------------------------------------------------------
// Half-space profile

ProfileReport halfspace_profile_check(const StableModel& model, const ConeDomain& domain,
                                      std::span<const double> x_grid, double t, std::size_t n,
                                      const EstimatorOptions& opt) {
  require_positive_n(n);
  require_grid(x_grid, "distance grid");
  if (!is_half_line_or_half_space(domain)) fail(ErrorCode::InvalidArgument, "profile check needs a half-space");
  ProfileReport rep;
  rep.distances.assign(x_grid.begin(), x_grid.end());
  std::sort(rep.distances.begin(), rep.distances.end());
  const Vec axis = domain.reference_direction();
  const SchemeParams scheme = scheme_for(model, t, opt);
  const double scale = std::pow(t, 1.0 / model.alpha());
  std::vector<double> alive;
  for (std::size_t i = 0; i < rep.distances.size(); ++i) {
    const auto recs = simulate_exits(model, domain, axis * rep.distances[i], t, scheme, n,
                                     opt.run.with_stream(400 + i));
    const auto a = static_cast<std::size_t>(
        std::count_if(recs.begin(), recs.end(), [](const ExitRecord& r) { return r.survived; }));
    alive.push_back(static_cast<double>(a));
    rep.survival.push_back(bernoulli_estimate(a, n));
  }

  std::vector<double> bx, ba, px, pa;
  for (std::size_t i = 0; i < rep.distances.size(); ++i) {
    if (rep.distances[i] <= scale / 4.0) {
      bx.push_back(rep.distances[i]);
      ba.push_back(alive[i]);
    } else if (rep.distances[i] >= 4.0 * scale) {
      px.push_back(rep.distances[i]);
      pa.push_back(alive[i]);
    }
  }
  if (bx.size() < 3 || px.size() < 2)
    fail(ErrorCode::DegenerateGrid, "need three distances below t^{1/alpha}/4 and two above 4 t^{1/alpha}");

  const std::vector<double> bn(bx.size(), static_cast<double>(n));
  const LogFit branch = fit_loglog(bx, ba, bn, opt.min_count);
  rep.branch.abscissa = bx;
  rep.branch.used = branch.used;
  rep.branch.intercept = branch.line.intercept;
  for (double a : ba) rep.branch.survival.push_back(bernoulli_estimate(static_cast<std::size_t>(a), n));

  // Plateau: plain WLS on linear probabilities against log distance.
  std::vector<double> lx, lp, lw;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double p = pa[i] / static_cast<double>(n);
    lx.push_back(std::log(px[i]));
    lp.push_back(p);
    lw.push_back(static_cast<double>(n) / std::max(p * (1.0 - p), 1.0 / static_cast<double>(n)));
    rep.plateau_level += p / static_cast<double>(px.size());
  }
  const double plateau = px.size() >= 2 && lx.front() != lx.back() ? weighted_least_squares(lx, lp, lw).slope : 0.0;

  Rng rng = bootstrap_rng(opt, 3);
  std::vector<double> bdraws, pdraws;
  std::vector<double> bb(bx.size()), pp(px.size());
  for (std::size_t b = 0; b < opt.bootstrap_resamples; ++b) {
    for (std::size_t i = 0; i < bx.size(); ++i)
      bb[i] = static_cast<double>(std::binomial_distribution<long>(static_cast<long>(n), ba[i] / static_cast<double>(n))(rng));
    bdraws.push_back(refit_slope(bx, bb, bn, branch.used));
    for (std::size_t i = 0; i < px.size(); ++i)
      pp[i] = static_cast<double>(std::binomial_distribution<long>(static_cast<long>(n), pa[i] / static_cast<double>(n))(rng)) /
              static_cast<double>(n);
    pdraws.push_back(weighted_least_squares(lx, pp, lw).slope);
  }
  rep.branch.estimate = summarize_bootstrap(branch.line.slope, std::move(bdraws), n, "wls_profile_branch");
  rep.plateau_slope = summarize_bootstrap(plateau, std::move(pdraws), n, "wls_profile_plateau");
  return rep;
}

}  // namespace anisotable
