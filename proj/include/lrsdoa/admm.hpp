// SPDX-License-Identifier: Apache-2.0
//
// Generic scaled-form ADMM for problems of the form
//
//   minimize  c^T x + sum_i f_i(K_i x)
//
// over a real vector x. Each block i introduces a copy z_i = K_i x and is
// described by K_i, its adjoint and the prox of f_i. The x-update solves
// (sum_i K_i^T K_i) x = sum_i K_i^T (z_i - u_i) - c / rho, which the caller
// supplies as a cached solve. Over-relaxation, residual balancing and the
// usual primal/dual stopping rule (absolute + relative) are built in.

#ifndef LRSDOA_ADMM_HPP_
#define LRSDOA_ADMM_HPP_

#include "lrsdoa/hermitian.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lrsdoa {

struct SolverConfig {
  int max_iter = 5000;
  /// Absolute tolerances, scaled by sqrt(dimension) of the residual.
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  /// Relative tolerance against the size of the iterates.
  double tol_relative = 1e-4;
  /// Initial penalty rho.
  double admm_penalty = 1.0;
  /// Over-relaxation factor in (0, 2); 1 disables it.
  double relaxation = 1.6;
  /// Residual balancing: every adapt_interval iterations rho is doubled
  /// (halved) when the normalized primal residual exceeds the dual one by
  /// more than adapt_ratio (or vice versa). 0 keeps rho fixed.
  int adapt_interval = 50;
  double adapt_ratio = 10.0;
  /// Keep the per-iteration merit sequence in the report.
  bool record_history = false;
  bool verbose = false;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct SolverReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// Stopping thresholds the residuals were compared against at exit.
  double primal_tolerance = 0.0;
  double dual_tolerance = 0.0;
  double objective = 0.0;
  bool converged = false;
  double final_penalty = 0.0;
  /// rho * (||r||^2 + ||z_k - z_{k-1}||^2) per iteration, when recorded.
  std::vector<double> merit_history;
  /// Iterations at which rho changed, when recorded.
  std::vector<int> penalty_changes;
};

using LinearMap = std::function<RVector(const RVector&)>;
/// (v, t) -> argmin_z t f(z) + 1/2 ||z - v||^2.
using ProxMap = std::function<RVector(const RVector&, double)>;

struct AdmmBlock {
  std::string name;
  Index range_dimension = 0;
  /// Empty maps mean the identity.
  LinearMap apply;
  LinearMap adjoint;
  ProxMap prox;
};

struct AdmmProblem {
  Index dimension = 0;
  /// Optional linear cost c (empty = none).
  RVector linear_cost;
  std::vector<AdmmBlock> blocks;
  /// x -> (sum_i K_i^T K_i)^{-1} x.
  LinearMap normal_solve;
};

struct AdmmResult {
  RVector x;
  std::vector<RVector> z;
  SolverReport report;
};

AdmmResult run_admm(const AdmmProblem& problem, const SolverConfig& cfg);

/// Cached solver for (c I + B^T W B) x = r with W = diag(weights) > 0 and
/// B mapping R^n -> R^k, k small. Uses the Woodbury identity with one
/// k x k Cholesky factorization of c W^{-1} + B B^T.
class WoodburySolver {
 public:
  WoodburySolver(double shift, LinearMap apply, LinearMap adjoint, Index range_dimension,
                 const RVector& weights = RVector());
  /// Same, with B given as a dense matrix.
  WoodburySolver(double shift, const RMatrix& b, const RVector& weights = RVector());

  RVector solve(const RVector& r) const;

 private:
  void factor(const RMatrix& gram, const RVector& weights);

  double shift_;
  LinearMap apply_;
  LinearMap adjoint_;
  RMatrix chol_;  // lower Cholesky factor of c W^{-1} + B B^T
};

}  // namespace lrsdoa

#endif  // LRSDOA_ADMM_HPP_
