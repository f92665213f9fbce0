// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/solvers.hpp"

#include "lrsdoa/array_model.hpp"
#include "lrsdoa/proximal.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace lrsdoa {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

// Data normalization: programs are degree-one homogeneous, so solving with
// Rx / scale and multiplying the minimizer by scale is exact.
double data_scale(const HermitianMatrix& r) {
  const Index m = r.dimension();
  return m == 0 ? 0.0 : r.frobenius_norm() / std::sqrt(static_cast<double>(m));
}

SolverReport trivial_report() {
  SolverReport rep;
  rep.converged = true;
  return rep;
}

// Gather / scatter between full coordinates and a kept subset.
RVector gather(const RVector& v, const std::vector<Index>& pos) {
  RVector out(static_cast<Index>(pos.size()));
  for (size_t k = 0; k < pos.size(); ++k) out(static_cast<Index>(k)) = v(pos[k]);
  return out;
}

RVector scatter(const RVector& v, const std::vector<Index>& pos, Index full) {
  RVector out = RVector::Zero(full);
  for (size_t k = 0; k < pos.size(); ++k) out(pos[k]) = v(static_cast<Index>(k));
  return out;
}

// Fidelity block prox: z -> b + prox_{w t ||.||}(z - b).
ProxMap shifted_l2(RVector b, double weight) {
  return [b = std::move(b), weight](const RVector& v, double t) -> RVector {
    return b + prox_l2_block(RVector(v - b), weight * t);
  };
}

ProxMap psd_prox(std::shared_ptr<const HermitianCoordinates> c) {
  return [c](const RVector& v, double) -> RVector {
    return c->to_real(project_psd(c->from_real(v)));
  };
}

ProxMap nuclear_psd_prox(std::shared_ptr<const HermitianCoordinates> c, double weight) {
  return [c, weight](const RVector& v, double t) -> RVector {
    return c->to_real(prox_nuclear_psd(c->from_real(v), weight * t));
  };
}

ProxMap l1_prox(std::shared_ptr<const HermitianCoordinates> c, double weight) {
  return [c, weight](const RVector& v, double t) -> RVector {
    return c->to_real(soft_threshold_entries(c->from_real(v), weight * t));
  };
}

// v (coordinates of P, M x M) -> coordinates of A P A^H (m x m), and adjoint.
struct ManifoldOperator {
  std::shared_ptr<const CMatrix> a;
  std::shared_ptr<const HermitianCoordinates> grid_coords;
  std::shared_ptr<const HermitianCoordinates> array_coords;

  RVector apply(const RVector& v) const {
    const CMatrix p = grid_coords->from_real(v);
    return array_coords->to_real(*a * p * a->adjoint());
  }
  RVector adjoint(const RVector& w) const {
    const CMatrix x = array_coords->from_real(w);
    return grid_coords->to_real(a->adjoint() * x * *a);
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Objectives

double nuclear_norm(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMatrix>(x).singularValues().sum();
}

double entrywise_l1(const CMatrix& x) {
  return x.cwiseAbs().sum();
}

double lowrank_completion_objective(const CMatrix& x, const HermitianMatrix& rx_hat,
                                    const SupportSet& omega, double lambda1) {
  const CMatrix resid = support_projection(x - rx_hat.matrix(), omega, true);
  return nuclear_norm(x) + lambda1 * resid.norm();
}

double sparse_source_cov_objective(const CMatrix& p, const HermitianMatrix& l_hat,
                                   const CMatrix& a_tilde, double lambda2) {
  const CMatrix resid = l_hat.matrix() - a_tilde * p * a_tilde.adjoint();
  return entrywise_l1(p) + lambda2 * resid.norm();
}

double joint_objective(const CMatrix& p, const HermitianMatrix& rx_hat, const SupportSet& omega,
                       const CMatrix& a_tilde, double alpha, double beta) {
  const CMatrix lifted = a_tilde * p * a_tilde.adjoint();
  const CMatrix resid = support_projection(lifted - rx_hat.matrix(), omega, true);
  return nuclear_norm(lifted) + alpha * entrywise_l1(p) + beta * resid.norm();
}

double uncorrelated_objective(const RVector& p, const HermitianMatrix& rx_hat,
                              const SupportSet& omega, const CMatrix& a_tilde, double lambda_u) {
  const Index m = rx_hat.dimension();
  const CVector lifted = khatri_rao_manifold(a_tilde) * p.cast<Complex>();
  const CVector data = vectorize(rx_hat.matrix());
  double r2 = 0.0;
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (!omega.contains(i, j)) r2 += std::norm(lifted(i + j * m) - data(i + j * m));
    }
  }
  return p.cwiseAbs().sum() + lambda_u * std::sqrt(r2);
}

double unknown_support_objective(const CMatrix& l, const CMatrix& s, const HermitianMatrix& rx_hat,
                                 double gamma_d, double lambda_d) {
  return nuclear_norm(l) + gamma_d * entrywise_l1(s) + lambda_d * (rx_hat.matrix() - l - s).norm();
}

// ---------------------------------------------------------------------------
// Low-rank completion over the unobserved-noise entries.

MatrixEstimate solve_lowrank_completion(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                        double lambda1, const SolverConfig& cfg) {
  require_positive(lambda1, "lambda1");
  const Index m = rx_hat.dimension();
  if (omega.dimension() != m) throw std::invalid_argument("solve_lowrank_completion: Omega size");
  const double scale = data_scale(rx_hat);
  if (scale == 0.0) return {HermitianMatrix::zero(m), trivial_report()};

  auto full = std::make_shared<const HermitianCoordinates>(HermitianCoordinates::full(m));
  const HermitianCoordinates comp = HermitianCoordinates::complement_of(omega);
  const std::vector<Index> pos = comp.full_positions();
  const Index n = full->size();

  RVector diag = RVector::Ones(n);
  for (Index p : pos) diag(p) += 1.0;

  AdmmProblem prob;
  prob.dimension = n;
  prob.blocks.push_back({"psd", n, {}, {}, nuclear_psd_prox(full, 1.0)});
  prob.blocks.push_back({"fidelity", comp.size(),
                         [pos](const RVector& v) { return gather(v, pos); },
                         [pos, n](const RVector& v) { return scatter(v, pos, n); },
                         shifted_l2(comp.to_real(rx_hat.matrix() / scale), lambda1)});
  prob.normal_solve = [diag](const RVector& r) -> RVector { return r.cwiseQuotient(diag); };

  AdmmResult res = run_admm(prob, cfg);
  HermitianMatrix est(scale * full->from_real(res.z[0]));
  res.report.objective = lowrank_completion_objective(est.matrix(), rx_hat, omega, lambda1);
  return {std::move(est), std::move(res.report)};
}

// ---------------------------------------------------------------------------
// Sparse on-grid source covariance.

MatrixEstimate solve_sparse_source_cov(const HermitianMatrix& l_hat, const CMatrix& a_tilde,
                                       double lambda2, const SolverConfig& cfg) {
  require_positive(lambda2, "lambda2");
  const Index m = l_hat.dimension();
  const Index grid = a_tilde.cols();
  if (a_tilde.rows() != m || grid < 1) throw std::invalid_argument("solve_sparse_source_cov: shapes");
  const double scale = data_scale(l_hat);
  if (scale == 0.0) return {HermitianMatrix::zero(grid), trivial_report()};

  auto gc = std::make_shared<const HermitianCoordinates>(HermitianCoordinates::full(grid));
  auto ac = std::make_shared<const HermitianCoordinates>(HermitianCoordinates::full(m));
  const ManifoldOperator op{std::make_shared<const CMatrix>(a_tilde), gc, ac};
  const Index n = gc->size();
  const Index k = ac->size();
  auto apply = [op](const RVector& v) { return op.apply(v); };
  auto adjoint = [op](const RVector& w) { return op.adjoint(w); };
  auto normal = std::make_shared<const WoodburySolver>(2.0, apply, adjoint, k);

  AdmmProblem prob;
  prob.dimension = n;
  prob.blocks.push_back({"psd", n, {}, {}, psd_prox(gc)});
  prob.blocks.push_back({"l1", n, {}, {}, l1_prox(gc, 1.0)});
  prob.blocks.push_back({"fidelity", k, apply, adjoint,
                         shifted_l2(ac->to_real(l_hat.matrix() / scale), lambda2)});
  prob.normal_solve = [normal](const RVector& r) { return normal->solve(r); };

  AdmmResult res = run_admm(prob, cfg);
  HermitianMatrix est(scale * gc->from_real(res.z[0]));
  res.report.objective = sparse_source_cov_objective(est.matrix(), l_hat, a_tilde, lambda2);
  return {std::move(est), std::move(res.report)};
}

// ---------------------------------------------------------------------------
// Joint program.

MatrixEstimate solve_joint(const HermitianMatrix& rx_hat, const SupportSet& omega,
                           const CMatrix& a_tilde, double alpha, double beta,
                           const SolverConfig& cfg) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  const Index m = rx_hat.dimension();
  const Index grid = a_tilde.cols();
  if (a_tilde.rows() != m || omega.dimension() != m || grid < 1) {
    throw std::invalid_argument("solve_joint: shapes");
  }
  const double scale = data_scale(rx_hat);
  if (scale == 0.0) return {HermitianMatrix::zero(grid), trivial_report()};

  auto gc = std::make_shared<const HermitianCoordinates>(HermitianCoordinates::full(grid));
  auto ac = std::make_shared<const HermitianCoordinates>(HermitianCoordinates::full(m));
  const HermitianCoordinates comp = HermitianCoordinates::complement_of(omega);
  const std::vector<Index> pos = comp.full_positions();
  const ManifoldOperator op{std::make_shared<const CMatrix>(a_tilde), gc, ac};
  const Index n = gc->size();
  const Index k = ac->size();

  auto apply = [op](const RVector& v) { return op.apply(v); };
  auto adjoint = [op](const RVector& w) { return op.adjoint(w); };
  auto masked_apply = [op, pos](const RVector& v) { return gather(op.apply(v), pos); };
  auto masked_adjoint = [op, pos, k](const RVector& w) { return op.adjoint(scatter(w, pos, k)); };

  // Normal operator 2 I + A*(I + S^T S) A.
  RVector weights = RVector::Ones(k);
  for (Index p : pos) weights(p) += 1.0;
  auto normal = std::make_shared<const WoodburySolver>(2.0, apply, adjoint, k, weights);

  AdmmProblem prob;
  prob.dimension = n;
  prob.blocks.push_back({"psd", n, {}, {}, psd_prox(gc)});
  prob.blocks.push_back({"l1", n, {}, {}, l1_prox(gc, alpha)});
  prob.blocks.push_back({"nuclear", k, apply, adjoint, nuclear_psd_prox(ac, 1.0)});
  prob.blocks.push_back({"fidelity", comp.size(), masked_apply, masked_adjoint,
                         shifted_l2(comp.to_real(rx_hat.matrix() / scale), beta)});
  prob.normal_solve = [normal](const RVector& r) { return normal->solve(r); };

  AdmmResult res = run_admm(prob, cfg);
  HermitianMatrix est(scale * gc->from_real(res.z[0]));
  res.report.objective = joint_objective(est.matrix(), rx_hat, omega, a_tilde, alpha, beta);
  return {std::move(est), std::move(res.report)};
}

// ---------------------------------------------------------------------------
// Uncorrelated sources: nonnegative square-root lasso on the lifted manifold.

RMatrix masked_lifted_manifold(const CMatrix& a_tilde, const SupportSet& omega) {
  const Index m = a_tilde.rows();
  if (omega.dimension() != m) throw std::invalid_argument("masked_lifted_manifold: Omega size");
  const CMatrix kr = khatri_rao_manifold(a_tilde);
  const HermitianCoordinates comp = HermitianCoordinates::complement_of(omega);
  RMatrix b(comp.size(), a_tilde.cols());
  for (Index k = 0; k < a_tilde.cols(); ++k) {
    const Eigen::Map<const CMatrix> outer(kr.col(k).data(), m, m);
    b.col(k) = comp.to_real(outer);
  }
  return b;
}

VectorEstimate solve_uncorrelated(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                  const CMatrix& a_tilde, double lambda_u,
                                  const SolverConfig& cfg) {
  require_positive(lambda_u, "lambda_u");
  const Index m = rx_hat.dimension();
  const Index grid = a_tilde.cols();
  if (a_tilde.rows() != m || omega.dimension() != m || grid < 1) {
    throw std::invalid_argument("solve_uncorrelated: shapes");
  }
  const double scale = data_scale(rx_hat);
  if (scale == 0.0) return {RVector::Zero(grid), trivial_report()};

  auto b = std::make_shared<const RMatrix>(masked_lifted_manifold(a_tilde, omega));
  const HermitianCoordinates comp = HermitianCoordinates::complement_of(omega);
  auto normal = std::make_shared<const WoodburySolver>(1.0, *b);

  AdmmProblem prob;
  prob.dimension = grid;
  prob.blocks.push_back({"nonneg_l1", grid, {}, {},
                         [](const RVector& v, double t) { return prox_l1_nonneg(v, t); }});
  prob.blocks.push_back({"fidelity", b->rows(),
                         [b](const RVector& v) -> RVector { return *b * v; },
                         [b](const RVector& w) -> RVector { return b->transpose() * w; },
                         shifted_l2(comp.to_real(rx_hat.matrix() / scale), lambda_u)});
  prob.normal_solve = [normal](const RVector& r) { return normal->solve(r); };

  AdmmResult res = run_admm(prob, cfg);
  RVector est = scale * res.z[0];
  res.report.objective = uncorrelated_objective(est, rx_hat, omega, a_tilde, lambda_u);
  return {std::move(est), std::move(res.report)};
}

// ---------------------------------------------------------------------------
// Unknown support: low-rank plus sparse decomposition with both factors PSD.

Decomposition solve_unknown_support(const HermitianMatrix& rx_hat, double gamma_d,
                                    double lambda_d, const SolverConfig& cfg) {
  require_positive(gamma_d, "gamma_d");
  require_positive(lambda_d, "lambda_d");
  const Index m = rx_hat.dimension();
  const double scale = data_scale(rx_hat);
  if (scale == 0.0) return {HermitianMatrix::zero(m), HermitianMatrix::zero(m), trivial_report()};

  auto c = std::make_shared<const HermitianCoordinates>(HermitianCoordinates::full(m));
  const Index k = c->size();
  const Index n = 2 * k;
  auto head = [k](const RVector& v) -> RVector { return v.head(k); };
  auto tail = [k](const RVector& v) -> RVector { return v.tail(k); };
  auto into_head = [k](const RVector& w) -> RVector {
    RVector out = RVector::Zero(2 * k);
    out.head(k) = w;
    return out;
  };
  auto into_tail = [k](const RVector& w) -> RVector {
    RVector out = RVector::Zero(2 * k);
    out.tail(k) = w;
    return out;
  };

  AdmmProblem prob;
  prob.dimension = n;
  prob.blocks.push_back({"low_rank", k, head, into_head, nuclear_psd_prox(c, 1.0)});
  prob.blocks.push_back({"sparse_l1", k, tail, into_tail, l1_prox(c, gamma_d)});
  prob.blocks.push_back({"sparse_psd", k, tail, into_tail, psd_prox(c)});
  prob.blocks.push_back({"fidelity", k,
                         [k](const RVector& v) -> RVector { return v.head(k) + v.tail(k); },
                         [k](const RVector& w) -> RVector {
                           RVector out(2 * k);
                           out << w, w;
                           return out;
                         },
                         shifted_l2(c->to_real(rx_hat.matrix() / scale), lambda_d)});
  // sum K^T K = [[2, 1], [1, 3]] (x) I, inverse [[3, -1], [-1, 2]] / 5.
  prob.normal_solve = [k](const RVector& r) -> RVector {
    RVector out(2 * k);
    out.head(k) = (3.0 * r.head(k) - r.tail(k)) / 5.0;
    out.tail(k) = (2.0 * r.tail(k) - r.head(k)) / 5.0;
    return out;
  };

  AdmmResult res = run_admm(prob, cfg);
  HermitianMatrix low(scale * c->from_real(res.z[0]));
  HermitianMatrix sparse(scale * c->from_real(res.z[2]));
  res.report.objective =
      unknown_support_objective(low.matrix(), sparse.matrix(), rx_hat, gamma_d, lambda_d);
  return {std::move(low), std::move(sparse), std::move(res.report)};
}

// ---------------------------------------------------------------------------

double lambda_u_rule(const CMatrix& a_tilde, const SupportSet& omega, int n_trials,
                     std::uint64_t seed) {
  if (n_trials < 100) throw std::invalid_argument("lambda_u_rule: need at least 100 trials");
  const Index m = a_tilde.rows();
  if (omega.dimension() != m) throw std::invalid_argument("lambda_u_rule: Omega size");
  const Index n = omega.complement_size();
  if (n == 0) throw std::invalid_argument("lambda_u_rule: Omega covers every entry");

  // Rows of the Khatri-Rao manifold at the unobserved entries.
  const CMatrix kr = khatri_rao_manifold(a_tilde);
  CMatrix x(n, a_tilde.cols());
  Index row = 0;
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (!omega.contains(i, j)) x.row(row++) = kr.row(i + j * m);
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix e(n, n_trials);
  for (Index t = 0; t < n_trials; ++t) {
    for (Index i = 0; i < n; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      e(i, t) = Complex(re, im);
    }
  }
  const RMatrix score = (x.adjoint() * e).real().cwiseAbs();
  const double root_n = std::sqrt(static_cast<double>(n));
  double sum = 0.0;
  for (Index t = 0; t < n_trials; ++t) {
    sum += score.col(t).maxCoeff() / (root_n * e.col(t).norm());
  }
  const double s_inf = sum / static_cast<double>(n_trials);
  return 1.0 / (1.1 * s_inf * root_n);
}

}  // namespace lrsdoa
