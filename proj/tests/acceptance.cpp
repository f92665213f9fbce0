// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: lrsdoa_acceptance [--only N]... [--threads T]

#include "lrsdoa/crb.hpp"
#include "lrsdoa/experiment.hpp"
#include "lrsdoa/proximal.hpp"
#include "oracle/pdhg.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace lrsdoa;

namespace {

unsigned g_threads = 0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "  failed: " << what << '\n';
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ExperimentConfig config(const char* file, int trials) {
  ConfigOverrides ov;
  ov.trials = trials;
  ov.threads = g_threads;
  return load_experiment_config(std::string(LRSDOA_CONFIG_DIR) + "/" + file, ov);
}

void print_rows(Outcome& o, const std::vector<ResultRow>& rows) {
  for (const ResultRow& r : rows) {
    o.detail << "  " << r.sweep_name << '=' << num(r.sweep_value) << ":";
    for (size_t k = 0; k < r.rmse_deg.size(); ++k) {
      o.detail << "  rmse[" << k << "]=" << num(r.rmse_deg[k]) << " crb_sqrt[" << k
               << "]=" << num(r.crb_sqrt_deg[k]);
    }
    o.detail << "  shortfall=" << r.n_shortfall << " unconverged=" << r.n_unconverged << '\n';
  }
}

// 1. RMSE tracks the bound at moderate sample sizes.
void criterion1(Outcome& o) {
  ExperimentConfig c = config("fig1.json", 100);
  c.sweep_values = {500, 5000};
  const std::vector<ResultRow> rows = run_experiment(c);
  print_rows(o, rows);
  for (const ResultRow& r : rows) {
    for (size_t k = 0; k < 2; ++k) {
      const std::string at = "N=" + num(r.sweep_value) + " angle " + std::to_string(k);
      o.require(r.rmse_deg[k] <= 3.0 * r.crb_sqrt_deg[k], at + ": rmse <= 3 sqrt(crb)");
      o.require(r.rmse_deg[k] <= 0.3, at + ": rmse <= 0.3 deg");
    }
  }
}

// 2. RMSE saturates at the grid resolution for large N.
void criterion2(Outcome& o) {
  ExperimentConfig c = config("fig1.json", 50);
  c.sweep_values = {1e5};
  const std::vector<ResultRow> rows = run_experiment(c);
  print_rows(o, rows);
  for (size_t k = 0; k < 2; ++k) {
    const double e = rows[0].rmse_deg[k];
    o.require(e >= 0.02 && e <= 0.1, "angle " + std::to_string(k) + ": rmse in [0.02, 0.1]");
  }
}

// 3. RMSE versus SNR.
void criterion3(Outcome& o) {
  const ExperimentConfig c = config("fig2.json", 100);
  const std::vector<ResultRow> rows = run_experiment(c);
  print_rows(o, rows);
  for (size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i + 1].sweep_value > 0.0) break;
    for (size_t k = 0; k < 2; ++k) {
      o.require(rows[i + 1].rmse_deg[k] <= 1.2 * rows[i].rmse_deg[k],
                "rmse non-increasing from " + num(rows[i].sweep_value) + " to " +
                    num(rows[i + 1].sweep_value) + " dB, angle " + std::to_string(k));
    }
  }
  const ResultRow& top = rows.back();
  o.require(top.sweep_value == 20.0, "last sweep point is 20 dB");
  for (size_t k = 0; k < 2; ++k) {
    o.require(top.rmse_deg[k] >= 0.02 && top.rmse_deg[k] <= 0.15,
              "20 dB rmse in [0.02, 0.15], angle " + std::to_string(k));
    o.require(top.crb_sqrt_deg[k] < top.rmse_deg[k], "20 dB sqrt(crb) < rmse, angle " + std::to_string(k));
  }
}

// 4. Correlated sources: two-step estimator versus the uncorrelated model.
void criterion4(Outcome& o) {
  const ExperimentConfig c = config("fig3.json", 50);
  const std::vector<HistogramRow> rows = run_histogram(c);
  std::vector<double> mae_two(2, 0.0), mae_unc(2, 0.0);
  std::vector<bool> trial_ok(static_cast<size_t>(c.n_trials), true);
  for (const HistogramRow& r : rows) {
    const double err = std::abs(r.estimate_deg - r.true_deg);
    const auto k = static_cast<size_t>(r.angle_index);
    if (r.estimator == "two-step") {
      mae_two[k] += err / c.n_trials;
      if (err > 0.75 || r.shortfall) trial_ok[static_cast<size_t>(r.trial)] = false;
    } else {
      mae_unc[k] += err / c.n_trials;
    }
  }
  int within = 0;
  for (bool ok : trial_ok) within += ok ? 1 : 0;
  o.detail << "  two-step within 0.75 deg: " << within << "/" << c.n_trials << "  mae two-step=("
           << num(mae_two[0]) << ", " << num(mae_two[1]) << ")  mae uncorrelated=(" << num(mae_unc[0])
           << ", " << num(mae_unc[1]) << ")\n";
  o.require(within >= 0.8 * c.n_trials, "two-step within 0.75 deg in >= 80% of trials");
  o.require(mae_unc[0] > mae_two[0] || mae_unc[1] > mae_two[1],
            "uncorrelated-model MAE exceeds two-step MAE for some angle");
}

// 5. ADMM objectives against the primal-dual oracle.
void criterion5(Outcome& o) {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> ang(15.0, 165.0), snr(-5.0, 10.0), coup(-0.45, 0.45);
  std::uniform_int_distribution<int> snaps(20, 200);
  const ArrayGeometry g = ArrayGeometry::uniform_linear(4);
  const CMatrix a12 = manifold_matrix(g, AngularGrid::uniform(12));
  const CMatrix a6 = manifold_matrix(g, AngularGrid::uniform(6));
  SolverConfig cfg;
  cfg.tol_primal = cfg.tol_dual = 1e-10;
  cfg.tol_relative = 1e-9;
  cfg.max_iter = 200000;
  const char* names[] = {"low-rank completion", "sparse source covariance", "joint", "uncorrelated",
                         "unknown support"};
  double worst[5] = {0, 0, 0, 0, 0};
  for (int inst = 0; inst < 10; ++inst) {
    const NoiseModel noise = tridiagonal_noise_covariance(4, 1.0, Complex(coup(rng), coup(rng)));
    const SourceScenario sc = SourceScenario::uncorrelated({ang(rng), ang(rng)}, snr(rng));
    const HermitianMatrix rx = sample_covariance(simulate_snapshots(sc, noise, g, snaps(rng), rng()));
    const auto& om = noise.support();
    const MatrixEstimate l = solve_lowrank_completion(rx, om, 10.0, cfg);
    const double got[5] = {l.report.objective, solve_sparse_source_cov(l.estimate, a12, 5.0, cfg).report.objective,
                           solve_joint(rx, om, a6, 1.0, 10.0, cfg).report.objective,
                           solve_uncorrelated(rx, om, a12, 2.0, cfg).report.objective,
                           solve_unknown_support(rx, 0.3, 10.0, cfg).report.objective};
    const double ref[5] = {oracle::lowrank_completion(rx.matrix(), om.mask(), 10.0),
                           oracle::sparse_source_cov(l.estimate.matrix(), a12, 5.0),
                           oracle::joint(rx.matrix(), om.mask(), a6, 1.0, 10.0),
                           oracle::uncorrelated(rx.matrix(), om.mask(), a12, 2.0),
                           oracle::unknown_support(rx.matrix(), 0.3, 10.0)};
    for (int p = 0; p < 5; ++p) {
      const double rel = std::abs(got[p] - ref[p]) / std::abs(ref[p]);
      worst[p] = std::max(worst[p], rel);
      o.require(rel <= 1e-4, std::string(names[p]) + ", instance " + std::to_string(inst) +
                                 ": relative gap " + num(rel));
    }
  }
  for (int p = 0; p < 5; ++p) o.detail << "  " << names[p] << ": worst relative gap " << num(worst[p]) << '\n';
}

// 6. Exact covariance input to low-rank completion.
void criterion6(Outcome& o) {
  const ArrayGeometry g = ArrayGeometry::uniform_linear(10);
  const NoiseModel noise = tridiagonal_noise_covariance(10, 1.0, Complex(0.0, 0.5));
  SolverConfig cfg;
  cfg.tol_primal = cfg.tol_dual = 1e-10;
  cfg.tol_relative = 1e-9;
  cfg.max_iter = 200000;
  for (const SourceScenario& sc : {SourceScenario::uncorrelated({88.05, 91.95}, 0.0),
                                   SourceScenario::correlated_pair(84.75, 95.25, 0.99, -2.5)}) {
    const CMatrix a = steering_matrix(g, sc.thetas_deg);
    const CMatrix l0 = a * effective_source_covariance(sc, noise).matrix() * a.adjoint();
    const HermitianMatrix rx = exact_covariance(sc, noise, g);
    const MatrixEstimate est = solve_lowrank_completion(rx, noise.support(), 10.0, cfg);
    const double err = (est.estimate.matrix() - l0).norm() / l0.norm();
    o.detail << "  thetas (" << num(sc.thetas_deg[0]) << ", " << num(sc.thetas_deg[1])
             << "): relative error " << num(err) << '\n';
    o.require(err <= 1e-3, "relative Frobenius error <= 1e-3");
  }
}

// 7. Structural properties.
void criterion7(Outcome& o) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  auto rand_c = [&](Index r, Index c) {
    CMatrix x(r, c);
    for (Index k = 0; k < x.size(); ++k) x(k) = Complex(nd(rng), nd(rng));
    return x;
  };
  auto rand_h = [&](Index n) {
    const CMatrix x = rand_c(n, n);
    return CMatrix(0.5 * (x + x.adjoint()));
  };
  const Index m = 6;
  const SupportSet omega = band_support(m, 1);
  double nonexp = 0.0, idem = 0.0, compl_err = 0.0, kr_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const CMatrix x = rand_h(m), y = rand_h(m);
    const double tt = std::abs(nd(rng));
    const double d = (x - y).norm();
    nonexp = std::max(nonexp, (prox_nuclear_psd(x, tt) - prox_nuclear_psd(y, tt)).norm() - d);
    nonexp = std::max(nonexp, (soft_threshold_entries(x, tt) - soft_threshold_entries(y, tt)).norm() - d);
    nonexp = std::max(nonexp, (project_psd(x) - project_psd(y)).norm() - d);
    const CMatrix p = project_psd(x);
    idem = std::max(idem, (project_psd(p) - p).norm() / std::max(1.0, p.norm()));
    const CMatrix in = support_projection(x, omega, false), out = support_projection(x, omega, true);
    compl_err = std::max(compl_err, (in + out - x).norm() + std::abs(in.cwiseProduct(out.conjugate()).sum()));
  }
  const CMatrix a = manifold_matrix(ArrayGeometry::uniform_linear(m), AngularGrid::uniform(15));
  const CMatrix kr = khatri_rao_manifold(a);
  for (int t = 0; t < 20; ++t) {
    RVector pvec = RVector::NullaryExpr(15, [&] { return std::abs(nd(rng)); });
    const CMatrix lifted = a * pvec.cast<Complex>().asDiagonal() * a.adjoint();
    kr_err = std::max(kr_err, (vectorize(lifted) - kr * pvec.cast<Complex>()).norm() / lifted.norm());
  }
  o.detail << "  prox expansion " << num(nonexp) << ", psd idempotence " << num(idem) << ", support split "
           << num(compl_err) << ", Khatri-Rao " << num(kr_err) << '\n';
  o.require(nonexp <= 1e-10, "proximal maps are nonexpansive");
  o.require(idem <= 1e-12, "PSD projection is idempotent");
  o.require(compl_err <= 1e-12, "support projections are complementary");
  o.require(kr_err <= 1e-12, "Khatri-Rao vectorization identity");

  const ArrayGeometry g10 = ArrayGeometry::uniform_linear(10);
  const NoiseModel noise = tridiagonal_noise_covariance(10, 1.0, Complex(0.0, 0.5));
  const SourceScenario sc = SourceScenario::uncorrelated({88.05, 91.95}, 0.0);
  const RMatrix f1 = fisher_information(sc, noise, g10, 500), f2 = fisher_information(sc, noise, g10, 1000);
  const double lin = (f2 - 2.0 * f1).norm() / f2.norm();
  const RVector c1 = crb_doa(sc, noise, g10, 500), c2 = crb_doa(sc, noise, g10, 1000);
  const double halving = (c2 - 0.5 * c1).cwiseAbs().maxCoeff() / c2.maxCoeff();
  o.detail << "  FIM linearity " << num(lin) << ", CRB halving " << num(halving) << '\n';
  o.require(lin <= 1e-12, "FIM proportional to N");
  o.require(halving <= 1e-9, "CRB halves when N doubles");

  double deriv = 0.0;
  const double h = 1e-5;
  for (double th : {5.0, 30.0, 88.05, 91.95, 150.0, 175.0}) {
    const CVector fd =
        (steering_vector(g10, th + h * kRadToDeg) - steering_vector(g10, th - h * kRadToDeg)) / (2.0 * h);
    const CVector an = steering_derivative(g10, th);
    deriv = std::max(deriv, (fd - an).norm() / an.norm());
  }
  o.detail << "  steering derivative " << num(deriv) << '\n';
  o.require(deriv <= 1e-6, "steering derivative matches finite differences");

  ExperimentConfig c = config("fig1.json", 3);
  c.sweep_values = {200};
  c.estimators[0].grid_step_deg = 0.5;
  auto csv = [](const ExperimentConfig& cc) {
    std::ostringstream os;
    write_results_csv(os, run_experiment(cc));
    return os.str();
  };
  const std::string first = csv(c);
  c.threads = 1;
  o.require(csv(c) == first, "byte-identical reruns under a fixed seed");
  const CMatrix s1 = simulate_snapshots(sc, noise, g10, 64, 99), s2 = simulate_snapshots(sc, noise, g10, 64, 99);
  o.require(std::memcmp(s1.data(), s2.data(), sizeof(Complex) * static_cast<size_t>(s1.size())) == 0,
            "byte-identical snapshots under a fixed seed");
}

// 8. Noise-score rule for lambda_u.
void criterion8(Outcome& o) {
  const ArrayGeometry g = ArrayGeometry::uniform_linear(10);
  const NoiseModel noise = tridiagonal_noise_covariance(10, 1.0, Complex(0.0, 0.5));
  const double lu =
      lambda_u_rule(manifold_matrix(g, AngularGrid::spanning(0.0, 180.0, 0.1)), noise.support(), 200, 1);
  o.detail << "  lambda_u = " << num(lu) << " (reference 0.54)\n";
  o.require(std::abs(lu - 0.54) <= 0.2 * 0.54, "within 20% of 0.54");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) {
      g_threads = static_cast<unsigned>(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: lrsdoa_acceptance [--only N]... [--threads T]\n";
      return 2;
    }
  }
  if (g_threads == 0) g_threads = std::max(1u, std::thread::hardware_concurrency());

  const std::vector<std::function<void(Outcome&)>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                               criterion5, criterion6, criterion7, criterion8};
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "  exception: " << e.what() << '\n';
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "CRITERION " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  (" << num(secs) << " s)\n"
              << o.detail.str() << std::flush;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
