// SPDX-License-Identifier: Apache-2.0
//
// lrsdoa: command-line front end for simulation, estimation, CRB evaluation
// and Monte-Carlo experiments driven by a JSON configuration.

#include "lrsdoa/crb.hpp"
#include "lrsdoa/experiment.hpp"
#include "lrsdoa/matrix_io.hpp"
#include "lrsdoa/solvers.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

using namespace lrsdoa;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<unsigned> threads;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool monte_carlo) {
  cmd->add_option("--config", o.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output file (default: config 'output', else stdout)");
  cmd->add_option("--seed", o.seed, "base seed override");
  if (monte_carlo) {
    cmd->add_option("--trials", o.trials, "number of Monte-Carlo trials")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--paper-scale", o.paper_scale, "use the config's paper_scale trials and sweep");
  }
}

ExperimentConfig load(const CommonOptions& o) {
  ConfigOverrides ov;
  ov.seed = o.seed;
  ov.trials = o.trials;
  ov.threads = o.threads;
  ov.paper_scale = o.paper_scale;
  if (!o.out.empty()) ov.output = o.out;
  return load_experiment_config(o.config, ov);
}

// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int cmd_simulate(const CommonOptions& o, std::optional<long> snapshots) {
  const ExperimentConfig c = load(o);
  const double v = c.sweep_values.front();
  const double snr = c.sweep == SweepKind::SnrDb ? v : c.snr_db;
  const Index n = snapshots ? *snapshots
                            : (c.sweep == SweepKind::Snapshots ? static_cast<Index>(v) : c.snapshots);
  const CMatrix x = simulate_snapshots(c.scenario_at(snr), c.noise_model(), c.geometry(), n, c.base_seed);
  Output out(c.output);
  write_matrix(out.stream(), x);
  return 0;
}

int cmd_estimate(const CommonOptions& o, const std::string& input, bool from_snapshots) {
  const ExperimentConfig c = load(o);
  const CMatrix data = load_matrix(input);
  const HermitianMatrix rx = from_snapshots ? sample_covariance(data) : HermitianMatrix(data);
  if (rx.dimension() != c.sensors) {
    throw std::runtime_error("input has " + std::to_string(rx.dimension()) + " sensors, config has " +
                             std::to_string(c.sensors));
  }
  const NoiseModel noise = c.noise_model();
  const ArrayGeometry geom = c.geometry();
  const Index q = static_cast<Index>(c.thetas_deg.size());
  Output out(c.output);
  out.stream() << "estimator,angle_index,estimate_deg,power,shortfall,converged\n";
  for (const EstimatorSpec& e : c.estimators) {
    double lambda_u = e.regs.lambda_u;
    if (e.kind == EstimatorKind::Uncorrelated && e.auto_lambda_u) {
      lambda_u = lambda_u_rule(manifold_matrix(geom, AngularGrid::spanning(0.0, 180.0, e.grid_step_deg)),
                               noise.support(), c.lambda_u_trials, c.base_seed);
    }
    const DoaEstimate est = run_estimator(e, rx, noise.support(), geom, q, c.solver, lambda_u);
    for (size_t k = 0; k < est.angles_deg.size(); ++k) {
      out.stream() << e.label << ',' << k << ',' << fmt(est.angles_deg[k]) << ',' << fmt(est.powers[k])
                   << ',' << est.shortfall << ',' << est.converged << '\n';
    }
  }
  return 0;
}

int cmd_crb(const CommonOptions& o, bool source_cov_known) {
  const ExperimentConfig c = load(o);
  const NoiseModel noise = c.noise_model();
  CrbOptions opts;
  opts.source_cov_known = source_cov_known;
  Output out(c.output);
  out.stream() << "sweep_name,sweep_value,angle_index,true_deg,crb_sqrt_deg\n";
  for (double v : c.sweep_values) {
    const double snr = c.sweep == SweepKind::SnrDb ? v : c.snr_db;
    const double n = c.sweep == SweepKind::Snapshots ? v : static_cast<double>(c.snapshots);
    const RVector crb = crb_doa(c.scenario_at(snr), noise, c.geometry(), n, opts);
    for (Index k = 0; k < crb.size(); ++k) {
      out.stream() << (c.sweep == SweepKind::SnrDb ? "snr_db" : "N") << ',' << fmt(v) << ',' << k << ','
                   << fmt(c.thetas_deg[static_cast<size_t>(k)]) << ',' << fmt(std::sqrt(crb(k))) << '\n';
    }
  }
  return 0;
}

int cmd_experiment(const CommonOptions& o, bool timing) {
  ExperimentConfig c = load(o);
  c.record_timing = c.record_timing || timing;
  const std::vector<ResultRow> rows = run_experiment(c);
  Output out(c.output);
  write_results_csv(out.stream(), rows);
  return 0;
}

int cmd_histogram(const CommonOptions& o) {
  const ExperimentConfig c = load(o);
  const std::vector<HistogramRow> rows = run_histogram(c);
  Output out(c.output);
  write_histogram_csv(out.stream(), rows);
  return 0;
}

int cmd_lambda_u(const CommonOptions& o, std::optional<int> mc_trials) {
  const ExperimentConfig c = load(o);
  const NoiseModel noise = c.noise_model();
  const ArrayGeometry geom = c.geometry();
  const int n = mc_trials.value_or(c.lambda_u_trials);
  Output out(c.output);
  out.stream() << "estimator,grid_step_deg,grid_points,lambda_u\n";
  for (const EstimatorSpec& e : c.estimators) {
    if (e.kind != EstimatorKind::Uncorrelated) continue;
    const AngularGrid grid = AngularGrid::spanning(0.0, 180.0, e.grid_step_deg);
    const double lu = lambda_u_rule(manifold_matrix(geom, grid), noise.support(), n, c.base_seed);
    out.stream() << e.label << ',' << fmt(e.grid_step_deg) << ',' << grid.size() << ',' << fmt(lu) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DOA estimation in partially correlated noise"};
  app.require_subcommand(1);

  CommonOptions sim_o, est_o, crb_o, exp_o, hist_o, lam_o;
  std::optional<long> sim_n;
  std::string est_input;
  bool est_snapshots = false;
  bool crb_known = false;
  bool exp_timing = false;
  std::optional<int> lam_trials;

  auto* sim = app.add_subcommand("simulate", "write simulated snapshots to a matrix file");
  add_common(sim, sim_o, false);
  sim->add_option("--snapshots", sim_n, "number of snapshots (default: first sweep point)")
      ->check(CLI::PositiveNumber);

  auto* est = app.add_subcommand("estimate", "estimate DOAs from a covariance matrix file");
  add_common(est, est_o, false);
  est->add_option("--input", est_input, "covariance (or snapshot) matrix file")->required()->check(CLI::ExistingFile);
  est->add_flag("--from-snapshots", est_snapshots, "input holds snapshots; form the sample covariance");

  auto* crb = app.add_subcommand("crb", "print the square-root CRB per sweep point");
  add_common(crb, crb_o, false);
  crb->add_flag("--known-source-cov", crb_known, "treat the source covariance as known");

  auto* exp = app.add_subcommand("experiment", "run a Monte-Carlo RMSE experiment to CSV");
  add_common(exp, exp_o, true);
  exp->add_flag("--timing", exp_timing, "record wall time per sweep point");

  auto* hist = app.add_subcommand("histogram", "run estimators side by side; per-trial CSV");
  add_common(hist, hist_o, true);

  auto* lam = app.add_subcommand("lambda-u", "evaluate the noise-score rule for lambda_u");
  add_common(lam, lam_o, false);
  lam->add_option("--mc-trials", lam_trials, "Monte-Carlo draws (>= 100)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(sim_o, sim_n);
    if (*est) return cmd_estimate(est_o, est_input, est_snapshots);
    if (*crb) return cmd_crb(crb_o, crb_known);
    if (*exp) return cmd_experiment(exp_o, exp_timing);
    if (*hist) return cmd_histogram(hist_o);
    if (*lam) return cmd_lambda_u(lam_o, lam_trials);
  } catch (const std::exception& e) {
    std::cerr << "lrsdoa: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
