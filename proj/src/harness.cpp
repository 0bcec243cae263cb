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

#include "anisotable/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "anisotable/cone_geometry.hpp"
#include "anisotable/error.hpp"
#include "anisotable/estimators.hpp"
#include "anisotable/sampler.hpp"
#include "anisotable/stable_model.hpp"

namespace anisotable {
namespace {

using nlohmann::json;

struct KindName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::Sample, "sample"},
    {ExperimentKind::Survival, "survival"},
    {ExperimentKind::ExponentTime, "exponent-time"},
    {ExperimentKind::ExponentSpace, "exponent-space"},
    {ExperimentKind::Factorization, "factorization"},
    {ExperimentKind::Overshoot, "overshoot"},
    {ExperimentKind::Yaglom, "yaglom"},
    {ExperimentKind::Zolotarev, "zolotarev"},
    {ExperimentKind::BiasProbe, "bias-probe"},
};

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::ConfigInvalid, msg); }

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) config_error(fmt::format("{} must be a JSON object", where));
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_error(fmt::format("unknown field '{}' in {}", key, where));
}

const json& field(const json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) config_error(fmt::format("missing field '{}' in {}", key, where));
  return *it;
}

template <class T>
T get(const json& j, std::string_view key, std::string_view where) {
  try {
    return field(j, key, where).get<T>();
  } catch (const json::exception& e) {
    config_error(fmt::format("field '{}' in {}: {}", key, where, e.what()));
  }
}

std::size_t get_n(const json& p) {
  const auto n = get<long long>(p, "n", "params");
  if (n < 1) config_error("params.n must be at least 1");
  return static_cast<std::size_t>(n);
}

Vec vec_of(const json& j, int dim, std::string_view what) {
  std::vector<double> c;
  try {
    c = j.get<std::vector<double>>();
  } catch (const json::exception&) {
    config_error(fmt::format("{} must be an array of numbers", what));
  }
  if (static_cast<int>(c.size()) != dim) config_error(fmt::format("{} must have {} coordinates", what, dim));
  return Vec::from_span(c);
}

std::vector<Vec> vec_list(const json& p, std::string_view key, int dim) {
  const json& arr = field(p, key, "params");
  if (!arr.is_array() || arr.empty()) config_error(fmt::format("params.{} must be a nonempty array", key));
  std::vector<Vec> out;
  for (const auto& v : arr) out.push_back(vec_of(v, dim, fmt::format("params.{} entry", key)));
  return out;
}

std::vector<double> grid(const json& p, std::string_view key) {
  const auto g = get<std::vector<double>>(p, key, "params");
  if (g.empty()) config_error(fmt::format("params.{} must be nonempty", key));
  return g;
}

SchemeParams scheme_from_json(const json& j, const StableModel& model) {
  reject_unknown(j, {"eps", "delta", "small_jump_mode", "max_jumps_per_step"}, "scheme");
  SchemeParams s = SchemeParams::with_cutoff(model, get<double>(j, "eps", "scheme"), get<double>(j, "delta", "scheme"));
  if (j.contains("small_jump_mode")) {
    const auto mode = get<std::string>(j, "small_jump_mode", "scheme");
    if (mode == "drop") s.small_jump_mode = SmallJumpMode::Drop;
    else if (mode == "gaussian") s.small_jump_mode = SmallJumpMode::GaussianSurrogate;
    else config_error("scheme.small_jump_mode must be \"drop\" or \"gaussian\"");
  }
  if (j.contains("max_jumps_per_step")) s.max_jumps_per_step = get<long>(j, "max_jumps_per_step", "scheme");
  validate_scheme(model, s);
  return s;
}

json scheme_to_json(const SchemeParams& s) {
  return {{"eps", s.eps},
          {"delta", s.delta},
          {"small_jump_mode", s.small_jump_mode == SmallJumpMode::Drop ? "drop" : "gaussian"},
          {"max_jumps_per_step", s.max_jumps_per_step}};
}

// CSV assembly with shortest round-trip number formatting.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row_strings(header); }
  Csv(std::vector<std::string> header) { row_strings(header); }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((put(cells, first)), ...);
    buf_.push_back('\n');
    ++rows_;
  }
  void row_values(const std::vector<std::string>& cells) { row_strings(cells), ++rows_; }
  std::string str() const { return fmt::to_string(buf_); }
  std::size_t rows() const { return rows_; }

 private:
  template <class T>
  void put(const T& v, bool& first) {
    if (!first) buf_.push_back(',');
    first = false;
    fmt::format_to(std::back_inserter(buf_), "{}", v);
  }
  template <class C>
  void row_strings(const C& cells) {
    bool first = true;
    for (const auto& c : cells) put(c, first);
    buf_.push_back('\n');
  }

  fmt::memory_buffer buf_;
  std::size_t rows_ = 0;
};

std::vector<std::string> coord_header(std::string_view prefix, int d) {
  std::vector<std::string> h;
  for (int i = 1; i <= d; ++i) h.push_back(fmt::format("{}_{}", prefix, i));
  return h;
}

std::vector<std::string> coords(const Vec& v) {
  std::vector<std::string> c;
  for (double x : v.coords()) c.push_back(fmt::format("{}", x));
  return c;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string fmt_num(double v) { return fmt::format("{}", v); }

struct Context {
  const ExperimentConfig& config;
  StableModel model;
  ConeDomain domain;
  EstimatorOptions opt;
  OutputFiles files;
  json totals = json::object();
  std::size_t seeded_n = 0;
};

SchemeParams scheme_or_default(const Context& c, double t_max) {
  return c.opt.scheme ? *c.opt.scheme : SchemeParams::defaults(c.model, t_max);
}

void add_survival_rows(Csv& csv, const Vec& x, const std::vector<EstimateCI>& est, std::span<const double> times) {
  for (std::size_t k = 0; k < est.size(); ++k)
    csv.row_values(concat(coords(x), {fmt_num(times[k]), fmt_num(est[k].value), fmt_num(est[k].std_error),
                                      fmt::format("{}", est[k].n)}));
}

Csv survival_csv(int d) { return Csv(concat(coord_header("x", d), {"t", "p_hat", "se", "n"})); }

Csv exponent_csv() { return Csv({"target", "estimate", "ci_lo", "ci_hi", "n_points"}); }

void add_exponent_row(Csv& csv, std::string_view target, const ExponentFit& fit) {
  const auto used = std::count(fit.used.begin(), fit.used.end(), true);
  csv.row(target, fit.estimate.value, fit.estimate.ci_lo, fit.estimate.ci_hi, used);
}

void run_sample(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"x0", "t_max", "n"}, "params");
  const int d = c.model.dim();
  const Vec x0 = vec_of(field(p, "x0", "params"), d, "params.x0");
  const double t_max = get<double>(p, "t_max", "params");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  const auto recs = simulate_exits(c.model, c.domain, x0, t_max, scheme_or_default(c, t_max), n, c.opt.run);
  Csv csv(concat(concat({"batch", "path_id", "survived", "exit_time"}, coord_header("pre_exit", d)),
                 concat(coord_header("post_exit", d), {"exit_kind"})));
  std::size_t alive = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const ExitRecord& r = recs[i];
    alive += r.survived ? 1 : 0;
    std::vector<std::string> row{fmt::format("{}", i / kBatchSize), fmt::format("{}", i % kBatchSize),
                                 r.survived ? "1" : "0", fmt_num(r.exit_time)};
    row = concat(concat(row, coords(r.pre_exit)), coords(r.post_exit));
    row.emplace_back(to_string(r.exit_kind));
    csv.row_values(row);
  }
  c.files["exit_records.csv"] = csv.str();
  c.totals["paths"] = n;
  c.totals["survivors"] = alive;
}

void run_survival(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"x_list", "t_grid", "n"}, "params");
  const auto xs = vec_list(p, "x_list", c.model.dim());
  const auto times = grid(p, "t_grid");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  Csv csv = survival_csv(c.model.dim());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EstimatorOptions o = c.opt;
    o.run = c.opt.run.with_stream(i);
    const SurvivalCurve curve = survival_curve(c.model, c.domain, xs[i], times, n, o);
    add_survival_rows(csv, xs[i], curve.estimates(), curve.times);
  }
  c.files["survival.csv"] = csv.str();
  c.totals["rows"] = csv.rows();
}

void run_exponent_time(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"x", "t_grid", "n"}, "params");
  const Vec x = vec_of(field(p, "x", "params"), c.model.dim(), "params.x");
  const auto times = grid(p, "t_grid");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  const ExponentFit fit = survival_exponent_time(c.model, c.domain, x, times, n, c.opt);
  Csv ex = exponent_csv();
  add_exponent_row(ex, "beta_over_alpha", fit);
  Csv sv = survival_csv(c.model.dim());
  add_survival_rows(sv, x, fit.survival, fit.abscissa);
  c.files["exponent.csv"] = ex.str();
  c.files["survival.csv"] = sv.str();
  c.totals["estimate"] = fit.estimate.value;
}

void run_exponent_space(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"direction", "s_grid", "t", "n"}, "params");
  const Vec u = normalized(vec_of(field(p, "direction", "params"), c.model.dim(), "params.direction"));
  const auto radii = grid(p, "s_grid");
  const double t = get<double>(p, "t", "params");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  const ExponentFit fit = survival_exponent_space(c.model, c.domain, u, radii, t, n, c.opt);
  Csv ex = exponent_csv();
  add_exponent_row(ex, "beta", fit);
  Csv sv = survival_csv(c.model.dim());
  for (std::size_t i = 0; i < fit.abscissa.size(); ++i)
    add_survival_rows(sv, u * fit.abscissa[i], {fit.survival[i]}, std::vector<double>{t});
  c.files["exponent.csv"] = ex.str();
  c.files["survival.csv"] = sv.str();
  c.totals["estimate"] = fit.estimate.value;
}

void run_factorization(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"x_list", "y_list", "t", "n", "bandwidth"}, "params");
  const int d = c.model.dim();
  const auto xs = vec_list(p, "x_list", d);
  const auto ys = vec_list(p, "y_list", d);
  const double t = get<double>(p, "t", "params");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  std::optional<double> bw;
  if (p.contains("bandwidth")) bw = get<double>(p, "bandwidth", "params");
  const FactorizationTable tab = factorization_ratio(c.model, c.domain, xs, ys, t, n, bw, c.opt);
  Csv ratio({"x_id", "y_id", "ratio"});
  Csv detail({"x_id", "y_id", "killed_density", "free_density", "p_x", "p_y", "ratio"});
  for (std::size_t i = 0; i < tab.rows; ++i)
    for (std::size_t j = 0; j < tab.cols; ++j) {
      const std::size_t k = i * tab.cols + j;
      ratio.row(i, j, tab.ratio[k]);
      detail.row(i, j, tab.killed_density[k], tab.free_density[k], tab.survival_x[i].value,
                 tab.survival_y[j].value, tab.ratio[k]);
    }
  c.files["ratio.csv"] = ratio.str();
  c.files["factorization.csv"] = detail.str();
  c.totals["spread"] = std::isfinite(tab.spread) ? json(tab.spread) : json("inf");
  c.totals["bandwidth"] = tab.bandwidth;
}

void run_overshoot(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"x", "t_max", "n", "u_bins", "v_bins", "u_edges"}, "params");
  const Vec x = vec_of(field(p, "x", "params"), c.model.dim(), "params.x");
  const double t_max = get<double>(p, "t_max", "params");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  OvershootBins bins;
  if (p.contains("u_bins")) bins.u_bins = get<int>(p, "u_bins", "params");
  if (p.contains("v_bins")) bins.v_bins = get<int>(p, "v_bins", "params");
  if (p.contains("u_edges")) bins.u_edges = get<std::vector<double>>(p, "u_edges", "params");
  const OvershootReport rep = overshoot_conditional_check(c.model, c.domain, x, t_max, n, bins, c.opt);
  Csv csv({"u_lo", "u_hi", "count", "tv"});
  for (std::size_t b = 0; b < rep.tv.size(); ++b) csv.row(rep.u_edges[b], rep.u_edges[b + 1], rep.counts[b], rep.tv[b]);
  Csv summary({"jump_exits", "aggregate_tv"});
  summary.row(rep.jump_exits, rep.aggregate_tv);
  c.files["overshoot.csv"] = csv.str();
  c.files["overshoot_summary.csv"] = summary.str();
  c.totals["aggregate_tv"] = rep.aggregate_tv;
}

BinSpec bins_from_json(const json& j, int d) {
  reject_unknown(j, {"lo", "hi", "counts"}, "params.bins");
  BinSpec b;
  b.lo = vec_of(field(j, "lo", "params.bins"), d, "params.bins.lo");
  b.hi = vec_of(field(j, "hi", "params.bins"), d, "params.bins.hi");
  b.bins = get<std::vector<int>>(j, "counts", "params.bins");
  if (static_cast<int>(b.bins.size()) != d) config_error("params.bins.counts must have one entry per dimension");
  return b;
}

void write_histogram(Context& c, const std::string& name, const EmpiricalMeasure& m) {
  const int d = m.binning.dim();
  Csv csv(concat(concat(coord_header("bin_lo", d), coord_header("bin_hi", d)), {"mass"}));
  for (std::size_t k = 0; k < m.masses.size(); ++k) {
    const auto [lo, hi] = m.binning.bounds(k);
    auto row = concat(coords(lo), coords(hi));
    row.push_back(fmt_num(m.masses[k]));
    csv.row_values(row);
  }
  c.files[name] = csv.str();
}

void run_yaglom(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"start_list", "t_grid", "n", "bins"}, "params");
  const int d = c.model.dim();
  const auto starts = vec_list(p, "start_list", d);
  const auto times = grid(p, "t_grid");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  const BinSpec bins = bins_from_json(field(p, "bins", "params"), d);
  const YaglomTable tab = yaglom_convergence(c.model, c.domain, starts, times, n, bins, c.opt);
  Csv tv({"comparison", "start_a", "start_b", "t_a", "t_b", "tv"});
  for (std::size_t s = 0; s < tab.histograms.size(); ++s) {
    for (std::size_t k = 0; k < tab.times.size(); ++k)
      write_histogram(c, fmt::format("histogram_s{}_t{}.csv", s, k), tab.histograms[s][k]);
    for (std::size_t k = 0; k < tab.tv_consecutive[s].size(); ++k)
      tv.row("time", s, s, tab.times[k], tab.times[k + 1], tab.tv_consecutive[s][k]);
  }
  for (std::size_t s = 1; s < tab.tv_across_starts.size(); ++s)
    tv.row("start", 0, s, tab.times.back(), tab.times.back(), tab.tv_across_starts[s]);
  c.files["yaglom_tv.csv"] = tv.str();
}

void run_zolotarev(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"direction", "n"}, "params");
  const int d = c.model.dim();
  const Vec u = p.contains("direction")
                    ? normalized(vec_of(p["direction"], d, "params.direction"))
                    : c.domain.reference_direction();
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  const ProjectionCoeffs pc = projection_coefficients(c.model, u);
  const EstimateCI mc = sign_frequency(c.model, u, n, c.opt);
  const double a = c.model.alpha();
  double rho = mc.value;
  std::string source = "monte_carlo";
  if (a != 1.0) {
    rho = positivity_parameter(pc, a);
    source = "formula";
  } else if (c.model.symmetric()) {
    rho = 0.5;
    source = "symmetry";
  }
  Csv csv(concat(coord_header("u", d), {"alpha", "c_minus", "c_plus", "rho", "rho_source", "rho_mc", "rho_mc_se",
                                        "beta", "beta_hat"}));
  auto row = coords(u);
  for (const auto& v : {fmt_num(a), fmt_num(pc.c_minus), fmt_num(pc.c_plus), fmt_num(rho), source,
                        fmt_num(mc.value), fmt_num(mc.std_error), fmt_num(a * (1.0 - rho)), fmt_num(a * rho)})
    row.push_back(v);
  csv.row_values(row);
  c.files["zolotarev.csv"] = csv.str();
  c.totals["rho"] = rho;
}

void run_bias_probe(Context& c) {
  const json& p = c.config.params;
  reject_unknown(p, {"n"}, "params");
  const std::size_t n = get_n(p);
  c.seeded_n = n;
  const SchemeParams s = scheme_or_default(c, 1.0);
  const BiasProbeReport r = scheme_bias_probe(c.model, s, n, c.opt.run);
  Csv csv({"eps", "delta", "scaling_ks", "scaling_p", "oracle_ks", "oracle_p", "passed", "suggested_eps",
           "suggested_delta"});
  csv.row(s.eps, s.delta, r.scaling_ks, r.scaling_p, r.oracle_ks, r.oracle_p, r.passed ? 1 : 0, r.suggested_eps,
          r.suggested_delta);
  c.files["bias_probe.csv"] = csv.str();
  c.totals["passed"] = r.passed;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "sample";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  config_error(fmt::format("unknown experiment '{}'", name));
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& k : kKinds) v.push_back(k.kind);
    return v;
  }();
  return kinds;
}

json ExperimentConfig::canonical() const {
  json j = {{"experiment", std::string(to_string(kind))},
            {"model", model},
            {"domain", domain},
            {"params", params},
            {"master_seed", master_seed}};
  if (scheme) j["scheme"] = *scheme;
  return j;
}

ExperimentConfig parse_config(const json& j, std::optional<ExperimentKind> kind_override,
                              std::optional<std::uint64_t> seed_override) {
  reject_unknown(j, {"experiment", "model", "domain", "params", "scheme", "master_seed", "worker_count", "out"},
                 "config");
  ExperimentConfig c;
  std::optional<ExperimentKind> from_file;
  if (j.contains("experiment")) from_file = experiment_kind_from_string(get<std::string>(j, "experiment", "config"));
  if (kind_override && from_file && *kind_override != *from_file)
    config_error("experiment on the command line differs from the config file");
  if (!kind_override && !from_file) config_error("no experiment kind given");
  c.kind = kind_override ? *kind_override : *from_file;
  c.model = field(j, "model", "config");
  c.domain = field(j, "domain", "config");
  c.params = field(j, "params", "config");
  if (!c.params.is_object()) config_error("params must be a JSON object");
  if (j.contains("scheme")) c.scheme = j["scheme"];
  if (seed_override) c.master_seed = *seed_override;
  else c.master_seed = get<std::uint64_t>(j, "master_seed", "config");
  if (j.contains("worker_count")) {
    const auto w = get<long long>(j, "worker_count", "config");
    if (w < 1) config_error("worker_count must be at least 1");
    c.worker_count = static_cast<unsigned>(w);
  }
  if (j.contains("out")) c.out = get<std::string>(j, "out", "config");
  // Validate the model and domain up front so errors name the right field.
  const StableModel model = model_from_json(c.model);
  if (domain_from_json(c.domain).dim() != model.dim()) config_error("domain and model dimensions differ");
  if (c.scheme) scheme_from_json(*c.scheme, model);
  return c;
}

unsigned resolve_workers(std::optional<unsigned> cli, const ExperimentConfig& config) {
  if (cli && *cli >= 1) return *cli;
  if (config.worker_count) return *config.worker_count;
  if (const char* env = std::getenv("ANISOTABLE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

RunResult run_experiment(const ExperimentConfig& config, unsigned workers) {
  const auto t0 = std::chrono::steady_clock::now();
  Context c{config, model_from_json(config.model), domain_from_json(config.domain), {}, {}, json::object(), 0};
  if (c.domain.dim() != c.model.dim()) config_error("domain and model dimensions differ");
  c.opt.run.master_seed = config.master_seed;
  c.opt.run.workers = std::max(1u, workers);
  if (config.scheme) c.opt.scheme = scheme_from_json(*config.scheme, c.model);

  switch (config.kind) {
    case ExperimentKind::Sample: run_sample(c); break;
    case ExperimentKind::Survival: run_survival(c); break;
    case ExperimentKind::ExponentTime: run_exponent_time(c); break;
    case ExperimentKind::ExponentSpace: run_exponent_space(c); break;
    case ExperimentKind::Factorization: run_factorization(c); break;
    case ExperimentKind::Overshoot: run_overshoot(c); break;
    case ExperimentKind::Yaglom: run_yaglom(c); break;
    case ExperimentKind::Zolotarev: run_zolotarev(c); break;
    case ExperimentKind::BiasProbe: run_bias_probe(c); break;
  }

  RunResult r;
  r.files = std::move(c.files);
  const json canonical = config.canonical();
  json outputs = json::object();
  for (const auto& [name, bytes] : r.files) outputs[name] = content_hash(bytes);
  json seeds = json::array();
  for (std::size_t b = 0; b < batch_count(c.seeded_n); ++b) seeds.push_back(batch_seed(c.opt.run, b));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.manifest = {{"tool_version", std::string(kToolVersion)},
                {"experiment", std::string(to_string(config.kind))},
                {"config_hash", content_hash(canonical.dump())},
                {"model_hash", fmt::format("{:016x}", model_hash(c.model))},
                {"master_seed", config.master_seed},
                {"batch_size", kBatchSize},
                {"batch_seeds", seeds},
                {"seed_rule", "seed_b = hash(hash(master_seed, stream), b); path stream = index within batch"},
                {"workers", c.opt.run.workers},
                {"wall_time_s", wall},
                {"totals", c.totals},
                {"config", canonical},
                {"outputs", outputs}};
  if (c.opt.scheme) r.manifest["scheme"] = scheme_to_json(*c.opt.scheme);
  return r;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  const auto write = [&](const std::string& name, const std::string& bytes) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + (dir / name).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "write failed for " + (dir / name).string());
  };
  for (const auto& [name, bytes] : result.files) write(name, bytes);
  write("manifest.json", result.manifest.dump(2) + "\n");
}

ReplayReport replay(const std::filesystem::path& manifest_path, std::optional<unsigned> workers) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigInvalid, std::string("manifest is not valid JSON: ") + e.what());
  }
  ReplayReport rep;
  const auto version = manifest.value("tool_version", std::string());
  if (version != kToolVersion)
    rep.warnings.push_back(fmt::format("manifest written by tool version {}, replaying with {}", version, kToolVersion));
  if (!manifest.contains("config") || !manifest.contains("outputs"))
    fail(ErrorCode::ConfigInvalid, "manifest lacks config or outputs");
  const ExperimentConfig config = parse_config(manifest["config"]);
  if (content_hash(config.canonical().dump()) != manifest.value("config_hash", std::string()))
    fail(ErrorCode::MismatchDetected, "config hash in the manifest does not match its embedded config");
  const RunResult fresh = run_experiment(config, workers.value_or(resolve_workers({}, config)));
  const auto dir = manifest_path.parent_path();
  for (const auto& [name, hash] : manifest["outputs"].items()) {
    const auto it = fresh.files.find(name);
    if (it == fresh.files.end()) fail(ErrorCode::MismatchDetected, "regeneration did not produce " + name);
    const std::string on_disk = read_file(dir / name);
    if (on_disk != it->second) fail(ErrorCode::MismatchDetected, name + " differs from its regeneration");
    if (content_hash(on_disk) != hash.get<std::string>())
      fail(ErrorCode::MismatchDetected, name + " does not match the hash recorded in the manifest");
    rep.checked.push_back(name);
  }
  if (fresh.files.size() != manifest["outputs"].size())
    fail(ErrorCode::MismatchDetected, "regeneration produced a different set of outputs");
  return rep;
}

}  // namespace anisotable
