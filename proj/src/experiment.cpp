// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/experiment.hpp"

#include "lrsdoa/crb.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace lrsdoa {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(join(path, item.key()), "unknown field");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

long long get_integer(const json& obj, const std::string& path, const std::string& key,
                      long long dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  fail(join(path, key), "expected an integer");
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& obj, const std::string& path, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_array()) fail(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(join(path, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const json* get_object(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) return nullptr;
  if (!obj.at(key).is_object()) fail(join(path, key), "expected an object");
  return &obj.at(key);
}

EstimatorSpec parse_estimator(const json& e, const std::string& path) {
  check_keys(e, path,
             {"label", "kind", "grid_step_deg", "lambda1", "lambda2", "alpha", "beta", "lambda_u",
              "gamma_d", "lambda_d", "coarse_step_deg", "fine_step_deg", "margin_deg"});
  EstimatorSpec s;
  if (!e.contains("kind")) fail(join(path, "kind"), "missing");
  try {
    s.kind = parse_estimator_kind(get_string(e, path, "kind", ""));
  } catch (const std::invalid_argument& ex) {
    fail(join(path, "kind"), ex.what());
  }
  s.label = get_string(e, path, "label", to_string(s.kind));
  s.grid_step_deg = get_number(e, path, "grid_step_deg", s.grid_step_deg);
  RegularizationSet& r = s.regs;
  r.lambda1 = get_number(e, path, "lambda1", r.lambda1);
  r.lambda2 = get_number(e, path, "lambda2", r.lambda2);
  r.alpha = get_number(e, path, "alpha", r.alpha);
  r.beta = get_number(e, path, "beta", r.beta);
  r.gamma_d = get_number(e, path, "gamma_d", r.gamma_d);
  r.lambda_d = get_number(e, path, "lambda_d", r.lambda_d);
  if (e.contains("lambda_u") && e.at("lambda_u").is_string()) {
    if (e.at("lambda_u").get<std::string>() != "auto") {
      fail(join(path, "lambda_u"), "expected a number or \"auto\"");
    }
    s.auto_lambda_u = true;
  } else {
    r.lambda_u = get_number(e, path, "lambda_u", r.lambda_u);
  }
  s.two_stage.coarse_step_deg = get_number(e, path, "coarse_step_deg", s.two_stage.coarse_step_deg);
  s.two_stage.fine_step_deg = get_number(e, path, "fine_step_deg", s.two_stage.fine_step_deg);
  s.two_stage.margin_deg = get_number(e, path, "margin_deg", s.two_stage.margin_deg);
  const std::pair<const char*, double> positive[] = {
      {"grid_step_deg", s.grid_step_deg}, {"lambda1", r.lambda1},
      {"lambda2", r.lambda2},             {"alpha", r.alpha},
      {"beta", r.beta},                   {"lambda_u", r.lambda_u},
      {"gamma_d", r.gamma_d},             {"lambda_d", r.lambda_d},
      {"coarse_step_deg", s.two_stage.coarse_step_deg},
      {"fine_step_deg", s.two_stage.fine_step_deg}};
  for (const auto& [key, value] : positive) {
    if (!(value > 0.0)) fail(join(path, key), "must be > 0");
  }
  if (!(s.two_stage.margin_deg >= 0.0)) fail(join(path, "margin_deg"), "must be >= 0");
  return s;
}

}  // namespace

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "uncorrelated") return EstimatorKind::Uncorrelated;
  if (name == "correlated-two-step") return EstimatorKind::CorrelatedTwoStep;
  if (name == "joint") return EstimatorKind::Joint;
  if (name == "unknown-support") return EstimatorKind::UnknownSupport;
  throw std::invalid_argument("unknown estimator '" + name +
                              "' (expected uncorrelated, correlated-two-step, joint or "
                              "unknown-support)");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Uncorrelated: return "uncorrelated";
    case EstimatorKind::CorrelatedTwoStep: return "correlated-two-step";
    case EstimatorKind::Joint: return "joint";
    case EstimatorKind::UnknownSupport: return "unknown-support";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (sensors < 2) fail("array.sensors", "must be >= 2");
  if (thetas_deg.empty()) fail("scenario.thetas_deg", "must not be empty");
  if (static_cast<Index>(thetas_deg.size()) >= sensors) {
    fail("scenario.thetas_deg", "need fewer sources than sensors");
  }
  for (double t : thetas_deg) {
    if (!(t > 0.0 && t < 180.0)) fail("scenario.thetas_deg", "angles must lie in (0, 180)");
  }
  if (!(std::abs(correlation) < 1.0)) fail("scenario.correlation", "|rho| must be < 1");
  if (correlation != 0.0 && thetas_deg.size() != 2) {
    fail("scenario.correlation", "correlated scenarios need exactly two sources");
  }
  if (snapshots < 1) fail("scenario.snapshots", "must be >= 1");
  if (sweep_values.empty()) fail("sweep.values", "must not be empty");
  for (double v : sweep_values) {
    if (!std::isfinite(v)) fail("sweep.values", "must be finite");
    if (sweep == SweepKind::Snapshots && !(v >= 1.0 && std::floor(v) == v)) {
      fail("sweep.values", "snapshot counts must be positive integers");
    }
  }
  if (estimators.empty()) fail("estimators", "must name at least one estimator");
  if (n_trials < 1) fail("trials", "must be >= 1");
  if (lambda_u_trials < 100) fail("lambda_u_trials", "must be >= 100");
  if (noise.kind != "tridiagonal" && noise.kind != "white") {
    fail("noise.kind", "expected \"tridiagonal\" or \"white\"");
  }
  if (!(noise.diag > 0.0)) fail("noise.diag", "must be > 0");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    fail("solver", e.what());
  }
  try {
    (void)noise_model();
  } catch (const std::invalid_argument& e) {
    fail("noise", e.what());
  }
}

NoiseModel ExperimentConfig::noise_model() const {
  if (noise.kind == "white") {
    return NoiseModel(HermitianMatrix(noise.diag * CMatrix::Identity(sensors, sensors)),
                      SupportSet(sensors));
  }
  return tridiagonal_noise_covariance(sensors, noise.diag, noise.offdiag);
}

SourceScenario ExperimentConfig::scenario_at(double snr) const {
  if (correlation != 0.0) {
    return SourceScenario::correlated_pair(thetas_deg[0], thetas_deg[1], correlation, snr);
  }
  return SourceScenario::uncorrelated(thetas_deg, snr);
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const ConfigOverrides& overrides) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "",
             {"schema", "name", "array", "noise", "scenario", "sweep", "estimators", "trials",
              "base_seed", "lambda_u_trials", "solver", "exact_covariance", "crb",
              "record_timing", "threads", "output", "paper_scale"});
  const std::string schema = get_string(root, "", "schema", "");
  if (schema != kExperimentSchema) {
    fail("schema", "expected \"" + std::string(kExperimentSchema) + "\", got \"" + schema + "\"");
  }

  ExperimentConfig c;
  c.name = get_string(root, "", "name", c.name);
  if (const json* a = get_object(root, "", "array")) {
    check_keys(*a, "array", {"sensors"});
    c.sensors = get_integer(*a, "array", "sensors", c.sensors);
  }
  if (const json* n = get_object(root, "", "noise")) {
    check_keys(*n, "noise", {"kind", "diag", "offdiag"});
    c.noise.kind = get_string(*n, "noise", "kind", c.noise.kind);
    c.noise.diag = get_number(*n, "noise", "diag", c.noise.diag);
    if (n->contains("offdiag")) {
      const std::vector<double> z = get_numbers(*n, "noise", "offdiag");
      if (z.size() != 2) fail("noise.offdiag", "expected [re, im]");
      c.noise.offdiag = Complex(z[0], z[1]);
    }
  }
  const json* s = get_object(root, "", "scenario");
  if (!s) fail("scenario", "missing");
  check_keys(*s, "scenario", {"thetas_deg", "correlation", "snr_db", "snapshots"});
  if (!s->contains("thetas_deg")) fail("scenario.thetas_deg", "missing");
  c.thetas_deg = get_numbers(*s, "scenario", "thetas_deg");
  c.correlation = get_number(*s, "scenario", "correlation", c.correlation);
  c.snr_db = get_number(*s, "scenario", "snr_db", c.snr_db);
  c.snapshots = get_integer(*s, "scenario", "snapshots", c.snapshots);

  if (const json* w = get_object(root, "", "sweep")) {
    check_keys(*w, "sweep", {"variable", "values"});
    const std::string var = get_string(*w, "sweep", "variable", "N");
    if (var == "N") {
      c.sweep = SweepKind::Snapshots;
    } else if (var == "snr_db") {
      c.sweep = SweepKind::SnrDb;
    } else {
      fail("sweep.variable", "expected \"N\" or \"snr_db\"");
    }
    if (!w->contains("values")) fail("sweep.values", "missing");
    c.sweep_values = get_numbers(*w, "sweep", "values");
  } else {
    c.sweep = SweepKind::Snapshots;
    c.sweep_values = {static_cast<double>(c.snapshots)};
  }

  if (!root.contains("estimators") || !root.at("estimators").is_array()) {
    fail("estimators", "expected an array of estimator objects");
  }
  for (size_t i = 0; i < root.at("estimators").size(); ++i) {
    c.estimators.push_back(
        parse_estimator(root.at("estimators")[i], "estimators[" + std::to_string(i) + "]"));
  }

  c.n_trials = static_cast<int>(get_integer(root, "", "trials", c.n_trials));
  const long long seed = get_integer(root, "", "base_seed", static_cast<long long>(c.base_seed));
  if (seed < 0) fail("base_seed", "must be >= 0");
  c.base_seed = static_cast<std::uint64_t>(seed);
  c.lambda_u_trials = static_cast<int>(get_integer(root, "", "lambda_u_trials", c.lambda_u_trials));
  if (const json* v = get_object(root, "", "solver")) {
    check_keys(*v, "solver",
               {"max_iter", "tol_primal", "tol_dual", "tol_relative", "admm_penalty", "relaxation",
                "adapt_interval", "adapt_ratio", "verbose"});
    SolverConfig& sc = c.solver;
    sc.max_iter = static_cast<int>(get_integer(*v, "solver", "max_iter", sc.max_iter));
    sc.tol_primal = get_number(*v, "solver", "tol_primal", sc.tol_primal);
    sc.tol_dual = get_number(*v, "solver", "tol_dual", sc.tol_dual);
    sc.tol_relative = get_number(*v, "solver", "tol_relative", sc.tol_relative);
    sc.admm_penalty = get_number(*v, "solver", "admm_penalty", sc.admm_penalty);
    sc.relaxation = get_number(*v, "solver", "relaxation", sc.relaxation);
    sc.adapt_interval = static_cast<int>(get_integer(*v, "solver", "adapt_interval", sc.adapt_interval));
    sc.adapt_ratio = get_number(*v, "solver", "adapt_ratio", sc.adapt_ratio);
    sc.verbose = get_bool(*v, "solver", "verbose", sc.verbose);
  }
  c.exact_covariance = get_bool(root, "", "exact_covariance", c.exact_covariance);
  c.compute_crb = get_bool(root, "", "crb", c.compute_crb);
  c.record_timing = get_bool(root, "", "record_timing", c.record_timing);
  const long long threads = get_integer(root, "", "threads", 0);
  if (threads < 0) fail("threads", "must be >= 0");
  c.threads = static_cast<unsigned>(threads);
  c.output = get_string(root, "", "output", c.output);

  if (overrides.paper_scale) {
    if (const json* p = get_object(root, "", "paper_scale")) {
      check_keys(*p, "paper_scale", {"trials", "sweep_values"});
      c.n_trials = static_cast<int>(get_integer(*p, "paper_scale", "trials", c.n_trials));
      if (p->contains("sweep_values")) c.sweep_values = get_numbers(*p, "paper_scale", "sweep_values");
    }
  } else if (root.contains("paper_scale")) {
    check_keys(root.at("paper_scale"), "paper_scale", {"trials", "sweep_values"});
  }
  if (overrides.seed) c.base_seed = *overrides.seed;
  if (overrides.trials) c.n_trials = *overrides.trials;
  if (overrides.threads) c.threads = *overrides.threads;
  if (overrides.output) c.output = *overrides.output;
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_experiment_config(buf.str(), overrides);
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

void check_table(const std::vector<std::vector<double>>& estimates, const std::vector<double>& truth,
                 const char* who) {
  if (estimates.empty() || truth.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
  for (const auto& row : estimates) {
    if (row.size() != truth.size()) {
      throw std::invalid_argument(std::string(who) + ": every trial needs one estimate per angle");
    }
  }
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<double> rmse(const std::vector<std::vector<double>>& estimates,
                         const std::vector<double>& truth) {
  check_table(estimates, truth, "rmse");
  const std::vector<double> t = sorted(truth);
  std::vector<double> out(t.size(), 0.0);
  for (const auto& row : estimates) {
    const std::vector<double> e = sorted(row);
    for (size_t k = 0; k < t.size(); ++k) out[k] += (e[k] - t[k]) * (e[k] - t[k]);
  }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(estimates.size()));
  return out;
}

std::vector<double> mean_bias(const std::vector<std::vector<double>>& estimates,
                              const std::vector<double>& truth) {
  check_table(estimates, truth, "mean_bias");
  const std::vector<double> t = sorted(truth);
  std::vector<double> out(t.size(), 0.0);
  for (const auto& row : estimates) {
    const std::vector<double> e = sorted(row);
    for (size_t k = 0; k < t.size(); ++k) out[k] += e[k] - t[k];
  }
  for (double& v : out) v /= static_cast<double>(estimates.size());
  return out;
}

std::vector<double> complete_estimate(const DoaEstimate& est, Index count) {
  std::vector<double> out = est.angles_deg;
  if (static_cast<Index>(out.size()) > count) out.resize(static_cast<size_t>(count));
  double fill = 90.0;
  if (!est.powers.empty()) {
    const auto it = std::max_element(est.powers.begin(), est.powers.end());
    fill = est.angles_deg[static_cast<size_t>(it - est.powers.begin())];
  }
  while (static_cast<Index>(out.size()) < count) out.push_back(fill);
  return sorted(out);
}

// ---------------------------------------------------------------------------
// Trials

DoaEstimate run_estimator(const EstimatorSpec& spec, const HermitianMatrix& rx_hat,
                          const SupportSet& omega, const ArrayGeometry& geom, Index sources,
                          const SolverConfig& cfg, double lambda_u) {
  switch (spec.kind) {
    case EstimatorKind::Uncorrelated:
      return estimate_doas_uncorrelated(rx_hat, omega, geom,
                                        AngularGrid::spanning(0.0, 180.0, spec.grid_step_deg),
                                        lambda_u, sources, cfg);
    case EstimatorKind::CorrelatedTwoStep: {
      TwoStageOptions opts = spec.two_stage;
      opts.sources = sources;
      return coarse_to_fine_correlated(rx_hat, omega, geom, spec.regs, cfg, opts);
    }
    case EstimatorKind::Joint: {
      const AngularGrid grid = AngularGrid::spanning(0.0, 180.0, spec.grid_step_deg);
      MatrixEstimate p = solve_joint(rx_hat, omega, manifold_matrix(geom, grid), spec.regs.alpha,
                                     spec.regs.beta, cfg);
      DoaEstimate est = find_peaks(spectrum_from_matrix(p.estimate, grid), sources);
      est.converged = p.report.converged;
      return est;
    }
    case EstimatorKind::UnknownSupport: {
      const AngularGrid grid = AngularGrid::spanning(0.0, 180.0, spec.grid_step_deg);
      Decomposition d = solve_unknown_support(rx_hat, spec.regs.gamma_d, spec.regs.lambda_d, cfg);
      MatrixEstimate p =
          solve_sparse_source_cov(d.low_rank, manifold_matrix(geom, grid), spec.regs.lambda2, cfg);
      DoaEstimate est = find_peaks(spectrum_from_matrix(p.estimate, grid), sources);
      est.converged = d.report.converged && p.report.converged;
      return est;
    }
  }
  throw std::logic_error("run_estimator: unhandled estimator kind");
}

namespace {

// Runs fn(i) for i in [0, n) on a pool of worker threads. Exceptions are
// rethrown on the calling thread (the one from the lowest index wins).
template <class Fn>
void parallel_for(int n, unsigned threads, Fn fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(n, 1)));
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_index = std::numeric_limits<int>::max();
  std::exception_ptr failure;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct SweepPoint {
  double snr_db;
  Index snapshots;
};

SweepPoint sweep_point(const ExperimentConfig& c, double value) {
  if (c.sweep == SweepKind::SnrDb) return {value, c.snapshots};
  return {c.snr_db, static_cast<Index>(value)};
}

std::string sweep_name(const ExperimentConfig& c) {
  return c.sweep == SweepKind::SnrDb ? "snr_db" : "N";
}

std::vector<double> resolve_lambda_u(const ExperimentConfig& c, const SupportSet& omega,
                                     const ArrayGeometry& geom) {
  std::vector<double> out;
  for (const EstimatorSpec& e : c.estimators) {
    if (e.kind == EstimatorKind::Uncorrelated && e.auto_lambda_u) {
      const AngularGrid grid = AngularGrid::spanning(0.0, 180.0, e.grid_step_deg);
      out.push_back(lambda_u_rule(manifold_matrix(geom, grid), omega, c.lambda_u_trials, c.base_seed));
    } else {
      out.push_back(e.regs.lambda_u);
    }
  }
  return out;
}

HermitianMatrix trial_covariance(const ExperimentConfig& c, const SourceScenario& sc,
                                 const NoiseModel& noise, const ArrayGeometry& geom,
                                 Index snapshots, int trial) {
  if (c.exact_covariance) return exact_covariance(sc, noise, geom);
  return sample_covariance(
      simulate_snapshots(sc, noise, geom, snapshots, c.base_seed + static_cast<std::uint64_t>(trial)));
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& c) {
  c.validate();
  const NoiseModel noise = c.noise_model();
  const ArrayGeometry geom = c.geometry();
  const Index q = static_cast<Index>(c.thetas_deg.size());
  const EstimatorSpec& spec = c.estimators.front();
  const double lambda_u = resolve_lambda_u(c, noise.support(), geom).front();
  const std::vector<double> truth = sorted(c.thetas_deg);

  std::vector<ResultRow> rows;
  for (double value : c.sweep_values) {
    const auto start = std::chrono::steady_clock::now();
    const SweepPoint pt = sweep_point(c, value);
    const SourceScenario sc = c.scenario_at(pt.snr_db);

    std::vector<DoaEstimate> trials(static_cast<size_t>(c.n_trials));
    parallel_for(c.n_trials, c.threads, [&](int t) {
      const HermitianMatrix rx = trial_covariance(c, sc, noise, geom, pt.snapshots, t);
      trials[static_cast<size_t>(t)] = run_estimator(spec, rx, noise.support(), geom, q, c.solver, lambda_u);
    });

    ResultRow row;
    row.sweep_name = sweep_name(c);
    row.sweep_value = value;
    row.true_deg = truth;
    row.n_trials = c.n_trials;
    std::vector<std::vector<double>> table;
    for (const DoaEstimate& e : trials) {
      table.push_back(complete_estimate(e, q));
      row.n_shortfall += e.shortfall ? 1 : 0;
      row.n_unconverged += e.converged ? 0 : 1;
    }
    row.rmse_deg = rmse(table, truth);
    row.bias_deg = mean_bias(table, truth);
    row.crb_sqrt_deg.assign(truth.size(), std::numeric_limits<double>::quiet_NaN());
    if (c.compute_crb) {
      try {
        const RVector crb = crb_doa(sc, noise, geom, static_cast<double>(pt.snapshots));
        // crb_doa follows scenario order; results are reported in ascending angle order.
        std::vector<std::pair<double, double>> pairs;
        for (Index k = 0; k < q; ++k) pairs.emplace_back(c.thetas_deg[static_cast<size_t>(k)], std::sqrt(crb(k)));
        std::sort(pairs.begin(), pairs.end());
        for (size_t k = 0; k < pairs.size(); ++k) row.crb_sqrt_deg[k] = pairs[k].second;
      } catch (const std::exception& e) {
        std::cerr << "warning: no CRB at " << row.sweep_name << "=" << value << ": " << e.what() << '\n';
      }
    }
    if (row.n_unconverged > 0) {
      std::cerr << "warning: " << row.n_unconverged << " of " << c.n_trials
                << " trials hit the iteration limit at " << row.sweep_name << "=" << value << '\n';
    }
    if (c.record_timing) {
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<HistogramRow> run_histogram(const ExperimentConfig& c) {
  c.validate();
  const NoiseModel noise = c.noise_model();
  const ArrayGeometry geom = c.geometry();
  const Index q = static_cast<Index>(c.thetas_deg.size());
  const std::vector<double> lambda_u = resolve_lambda_u(c, noise.support(), geom);
  const std::vector<double> truth = sorted(c.thetas_deg);
  const size_t ne = c.estimators.size();

  std::vector<HistogramRow> rows;
  for (double value : c.sweep_values) {
    const SweepPoint pt = sweep_point(c, value);
    const SourceScenario sc = c.scenario_at(pt.snr_db);
    std::vector<DoaEstimate> results(static_cast<size_t>(c.n_trials) * ne);
    parallel_for(c.n_trials, c.threads, [&](int t) {
      const HermitianMatrix rx = trial_covariance(c, sc, noise, geom, pt.snapshots, t);
      for (size_t e = 0; e < ne; ++e) {
        results[static_cast<size_t>(t) * ne + e] =
            run_estimator(c.estimators[e], rx, noise.support(), geom, q, c.solver, lambda_u[e]);
      }
    });
    for (int t = 0; t < c.n_trials; ++t) {
      for (size_t e = 0; e < ne; ++e) {
        const DoaEstimate& est = results[static_cast<size_t>(t) * ne + e];
        const std::vector<double> angles = complete_estimate(est, q);
        for (Index k = 0; k < q; ++k) {
          rows.push_back({value, t, c.estimators[e].label, k, truth[static_cast<size_t>(k)],
                          angles[static_cast<size_t>(k)], est.shortfall});
        }
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kResultCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    for (size_t k = 0; k < r.true_deg.size(); ++k) {
      os << r.sweep_name << ',' << num(r.sweep_value) << ',' << k << ',' << num(r.true_deg[k]) << ','
         << num(r.rmse_deg[k]) << ',' << num(r.crb_sqrt_deg[k]) << ',' << num(r.bias_deg[k]) << ','
         << r.n_trials << ',' << r.n_shortfall << ',' << num(r.wall_ms) << '\n';
    }
  }
}

void write_histogram_csv(std::ostream& os, const std::vector<HistogramRow>& rows) {
  os << kHistogramCsvHeader << '\n';
  for (const HistogramRow& r : rows) {
    os << num(r.sweep_value) << ',' << r.trial << ',' << r.estimator << ',' << r.angle_index << ','
       << num(r.true_deg) << ',' << num(r.estimate_deg) << ',' << (r.shortfall ? 1 : 0) << '\n';
  }
}

}  // namespace lrsdoa
