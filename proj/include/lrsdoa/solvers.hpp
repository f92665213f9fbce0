// SPDX-License-Identifier: Apache-2.0
//
// Convex programs for separating the low-rank source term of a sample
// covariance from sparse-support noise, and for recovering on-grid source
// covariances from it. Every solver is ADMM with closed-form sub-steps and
// returns its estimate together with a SolverReport.
//
// All fidelity terms are plain (non-squared) Frobenius / Euclidean norms, so
// each objective is positively homogeneous of degree one in (variable, data)
// and the regularization weights are scale free. The solvers exploit this by
// normalizing the data before iterating.

#ifndef LRSDOA_SOLVERS_HPP_
#define LRSDOA_SOLVERS_HPP_

#include "lrsdoa/admm.hpp"
#include "lrsdoa/hermitian.hpp"

#include <cstdint>

namespace lrsdoa {

/// Regularization weights reported for the two simulation experiments.
inline constexpr double kDefaultLambdaU = 0.54;
inline constexpr double kDefaultLambda1 = 10.0;
inline constexpr double kDefaultLambda2 = 5.0;

struct RegularizationSet {
  double lambda1 = kDefaultLambda1;  // low-rank completion fidelity
  double lambda2 = kDefaultLambda2;  // sparse source covariance fidelity
  double alpha = 1.0;                // joint program: l1 weight
  double beta = 10.0;                // joint program: fidelity weight
  double lambda_u = kDefaultLambdaU; // uncorrelated-source fidelity
  double gamma_d = 0.3;              // unknown support: l1 weight on S
  double lambda_d = 10.0;            // unknown support: fidelity weight
};

struct MatrixEstimate {
  HermitianMatrix estimate;
  SolverReport report;
};

struct VectorEstimate {
  RVector estimate;
  SolverReport report;
};

struct Decomposition {
  HermitianMatrix low_rank;
  HermitianMatrix sparse;
  SolverReport report;
};

/// min ||X||_* + lambda1 ||P_{Omega^c}(X - Rx)||_F  s.t. X >= 0.
MatrixEstimate solve_lowrank_completion(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                        double lambda1, const SolverConfig& cfg = {});

/// min ||P||_1 + lambda2 ||L - A P A^H||_F  s.t. P >= 0, with ||P||_1 the sum
/// of entry magnitudes.
MatrixEstimate solve_sparse_source_cov(const HermitianMatrix& l_hat, const CMatrix& a_tilde,
                                       double lambda2, const SolverConfig& cfg = {});

/// min ||A P A^H||_* + alpha ||P||_1
///     + beta ||P_{Omega^c}(A P A^H - Rx)||_F  s.t. P >= 0.
MatrixEstimate solve_joint(const HermitianMatrix& rx_hat, const SupportSet& omega,
                           const CMatrix& a_tilde, double alpha, double beta,
                           const SolverConfig& cfg = {});

/// min ||p||_1 + lambda_u ||P_{Omega^c}((A* . A) p - vec(Rx))||_2  s.t. p >= 0.
VectorEstimate solve_uncorrelated(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                  const CMatrix& a_tilde, double lambda_u,
                                  const SolverConfig& cfg = {});

/// min ||L||_* + gamma_d ||S||_1 + lambda_d ||Rx - L - S||_F  s.t. L >= 0, S >= 0.
Decomposition solve_unknown_support(const HermitianMatrix& rx_hat, double gamma_d,
                                    double lambda_d, const SolverConfig& cfg = {});

// Objective evaluators. They accept arbitrary (not necessarily feasible)
// points and evaluate the formulas above without the constraints.
double nuclear_norm(const CMatrix& x);
double entrywise_l1(const CMatrix& x);
double lowrank_completion_objective(const CMatrix& x, const HermitianMatrix& rx_hat,
                                    const SupportSet& omega, double lambda1);
double sparse_source_cov_objective(const CMatrix& p, const HermitianMatrix& l_hat,
                                   const CMatrix& a_tilde, double lambda2);
double joint_objective(const CMatrix& p, const HermitianMatrix& rx_hat, const SupportSet& omega,
                       const CMatrix& a_tilde, double alpha, double beta);
double uncorrelated_objective(const RVector& p, const HermitianMatrix& rx_hat,
                              const SupportSet& omega, const CMatrix& a_tilde, double lambda_u);
double unknown_support_objective(const CMatrix& l, const CMatrix& s, const HermitianMatrix& rx_hat,
                                 double gamma_d, double lambda_d);

/// Masked, real-coordinate Khatri-Rao operator used by solve_uncorrelated:
/// column k holds the complement-of-Omega coordinates of a_k a_k^H.
RMatrix masked_lifted_manifold(const CMatrix& a_tilde, const SupportSet& omega);

/// Square-root-lasso weight 1 / (1.1 E||s||_inf sqrt(n)), n = m^2 - |Omega|.
///
/// s is the score of the fidelity term at pure noise: for each grid column
/// x_k of the masked lifted manifold, Re(x_k^H e) / (sqrt(n) ||e||) with e a
/// standard complex Gaussian vector on the n unobserved-noise entries. The
/// sup-norm is averaged over n_trials draws.
double lambda_u_rule(const CMatrix& a_tilde, const SupportSet& omega, int n_trials,
                     std::uint64_t seed);

}  // namespace lrsdoa

#endif  // LRSDOA_SOLVERS_HPP_
