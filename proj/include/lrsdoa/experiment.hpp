// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo experiment driver: JSON configuration, per-trial estimation on
// a worker pool, RMSE / bias / CRB aggregation and CSV output.

#ifndef LRSDOA_EXPERIMENT_HPP_
#define LRSDOA_EXPERIMENT_HPP_

#include "lrsdoa/admm.hpp"
#include "lrsdoa/array_model.hpp"
#include "lrsdoa/doa_pipeline.hpp"
#include "lrsdoa/signal_sim.hpp"
#include "lrsdoa/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrsdoa {

inline constexpr const char* kExperimentSchema = "lrsdoa.experiment/1";
inline constexpr const char* kResultCsvHeader =
    "sweep_name,sweep_value,angle_index,true_deg,rmse_deg,crb_sqrt_deg,bias_deg,n_trials,"
    "n_shortfall,wall_ms";
inline constexpr const char* kHistogramCsvHeader =
    "sweep_value,trial,estimator,angle_index,true_deg,estimate_deg,shortfall";

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EstimatorKind { Uncorrelated, CorrelatedTwoStep, Joint, UnknownSupport };

EstimatorKind parse_estimator_kind(const std::string& name);
std::string to_string(EstimatorKind kind);

struct EstimatorSpec {
  std::string label;
  EstimatorKind kind = EstimatorKind::Uncorrelated;
  /// Grid step for the single-grid estimators (uncorrelated, joint,
  /// unknown-support).
  double grid_step_deg = 0.1;
  TwoStageOptions two_stage;
  RegularizationSet regs;
  /// Derive lambda_u from the noise-score rule instead of regs.lambda_u.
  bool auto_lambda_u = false;
};

enum class SweepKind { Snapshots, SnrDb };

struct NoiseSpec {
  std::string kind = "tridiagonal";  // "tridiagonal" | "white"
  double diag = 1.0;
  Complex offdiag{0.0, 0.5};
};

struct ExperimentConfig {
  std::string name = "experiment";
  Index sensors = 10;
  NoiseSpec noise;
  std::vector<double> thetas_deg;
  double correlation = 0.0;  // real rho, two-source scenarios only
  double snr_db = 0.0;
  Index snapshots = 500;
  SweepKind sweep = SweepKind::Snapshots;
  std::vector<double> sweep_values;
  std::vector<EstimatorSpec> estimators;
  int n_trials = 100;
  std::uint64_t base_seed = 1;
  int lambda_u_trials = 200;
  SolverConfig solver;
  /// Feed the exact covariance instead of simulated snapshots.
  bool exact_covariance = false;
  bool compute_crb = true;
  /// Measure per-point wall time (otherwise written as 0 so reruns are
  /// byte-identical).
  bool record_timing = false;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string output;

  /// Throws ConfigError.
  void validate() const;
  NoiseModel noise_model() const;
  SourceScenario scenario_at(double snr_db) const;
  ArrayGeometry geometry() const { return ArrayGeometry::uniform_linear(sensors); }
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<unsigned> threads;
  std::optional<std::string> output;
  bool paper_scale = false;
};

/// Parses a JSON document. The `paper_scale` object, if present, replaces
/// n_trials / sweep.values when overrides.paper_scale is set.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const ConfigOverrides& overrides = {});
ExperimentConfig load_experiment_config(const std::string& path,
                                        const ConfigOverrides& overrides = {});

struct ResultRow {
  std::string sweep_name;
  double sweep_value = 0.0;
  std::vector<double> true_deg;
  std::vector<double> rmse_deg;
  std::vector<double> crb_sqrt_deg;  // NaN when the bound is undefined
  std::vector<double> bias_deg;
  int n_trials = 0;
  int n_shortfall = 0;
  int n_unconverged = 0;
  double wall_ms = 0.0;
};

struct HistogramRow {
  double sweep_value = 0.0;
  int trial = 0;
  std::string estimator;
  Index angle_index = 0;
  double true_deg = 0.0;
  double estimate_deg = 0.0;
  bool shortfall = false;
};

/// Per-angle root mean square error after sorted association. Every trial
/// must carry truth.size() estimates. Throws std::invalid_argument on empty
/// input or a size mismatch.
std::vector<double> rmse(const std::vector<std::vector<double>>& estimates,
                         const std::vector<double>& truth);
/// Per-angle mean signed error, same conventions as rmse.
std::vector<double> mean_bias(const std::vector<std::vector<double>>& estimates,
                              const std::vector<double>& truth);

/// Pads a short estimate to `count` angles by repeating its strongest peak
/// (90 deg if it has none) and sorts it.
std::vector<double> complete_estimate(const DoaEstimate& est, Index count);

/// One Monte-Carlo trial for one estimator. `rx_hat` is the covariance the
/// estimator sees.
DoaEstimate run_estimator(const EstimatorSpec& spec, const HermitianMatrix& rx_hat,
                          const SupportSet& omega, const ArrayGeometry& geom, Index sources,
                          const SolverConfig& cfg, double lambda_u);

/// Runs config.estimators.front() over every sweep value.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Runs every configured estimator on shared trials and returns one row per
/// (sweep value, trial, estimator, angle).
std::vector<HistogramRow> run_histogram(const ExperimentConfig& config);

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_histogram_csv(std::ostream& os, const std::vector<HistogramRow>& rows);

}  // namespace lrsdoa

#endif  // LRSDOA_EXPERIMENT_HPP_
