// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/admm.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <stdexcept>

namespace lrsdoa {

void SolverConfig::validate() const {
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) {
    throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  }
  if (!(tol_relative >= 0.0)) throw std::invalid_argument("SolverConfig: tol_relative must be >= 0");
  if (!(admm_penalty > 0.0)) throw std::invalid_argument("SolverConfig: admm_penalty must be > 0");
  if (!(relaxation > 0.0 && relaxation < 2.0)) {
    throw std::invalid_argument("SolverConfig: relaxation must lie in (0, 2)");
  }
  if (adapt_interval < 0 || !(adapt_ratio > 1.0)) {
    throw std::invalid_argument("SolverConfig: invalid residual-balancing settings");
  }
}

namespace {

RVector apply_or_identity(const LinearMap& f, const RVector& v) {
  return f ? f(v) : v;
}

}  // namespace

AdmmResult run_admm(const AdmmProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  const Index n = problem.dimension;
  const size_t nb = problem.blocks.size();
  if (nb == 0 || !problem.normal_solve) throw std::invalid_argument("run_admm: incomplete problem");
  const bool has_cost = problem.linear_cost.size() > 0;
  if (has_cost && problem.linear_cost.size() != n) {
    throw std::invalid_argument("run_admm: linear cost has the wrong size");
  }

  std::vector<RVector> z(nb), u(nb), kt_z(nb), kt_u(nb);
  Index total_range = 0;
  for (size_t i = 0; i < nb; ++i) {
    const Index d = problem.blocks[i].range_dimension;
    z[i] = RVector::Zero(d);
    u[i] = RVector::Zero(d);
    kt_z[i] = RVector::Zero(n);
    kt_u[i] = RVector::Zero(n);
    total_range += d;
  }
  const double cost_norm = has_cost ? problem.linear_cost.norm() : 0.0;
  const double sqrt_p = std::sqrt(static_cast<double>(total_range));
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double alpha = cfg.relaxation;

  double rho = cfg.admm_penalty;
  AdmmResult result;
  SolverReport& rep = result.report;
  RVector x = RVector::Zero(n);
  std::vector<RVector> kx(nb);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    RVector rhs = RVector::Zero(n);
    for (size_t i = 0; i < nb; ++i) rhs += kt_z[i] - kt_u[i];
    if (has_cost) rhs -= problem.linear_cost / rho;
    x = problem.normal_solve(rhs);

    double r2 = 0.0, dz2 = 0.0, kx2 = 0.0, z2 = 0.0;
    RVector kt_dz = RVector::Zero(n);
    double dual_scale = cost_norm;
    for (size_t i = 0; i < nb; ++i) {
      const AdmmBlock& b = problem.blocks[i];
      kx[i] = apply_or_identity(b.apply, x);
      const RVector hat = alpha * kx[i] + (1.0 - alpha) * z[i];
      RVector z_new = b.prox(hat + u[i], 1.0 / rho);
      u[i] += hat - z_new;
      dz2 += (z_new - z[i]).squaredNorm();
      r2 += (kx[i] - z_new).squaredNorm();
      kx2 += kx[i].squaredNorm();
      z2 += z_new.squaredNorm();
      z[i] = std::move(z_new);

      RVector kt_z_new = apply_or_identity(b.adjoint, z[i]);
      kt_dz += kt_z_new - kt_z[i];
      kt_z[i] = std::move(kt_z_new);
      kt_u[i] = apply_or_identity(b.adjoint, u[i]);
      dual_scale = std::max(dual_scale, rho * kt_u[i].norm());
    }

    const double r = std::sqrt(r2);
    const double s = rho * kt_dz.norm();
    const double primal_scale = std::sqrt(std::max(kx2, z2));
    const double eps_p = sqrt_p * cfg.tol_primal + cfg.tol_relative * primal_scale;
    const double eps_d = sqrt_n * cfg.tol_dual + cfg.tol_relative * dual_scale;

    rep.iterations = iter;
    rep.primal_residual = r;
    rep.dual_residual = s;
    rep.primal_tolerance = eps_p;
    rep.dual_tolerance = eps_d;
    if (cfg.record_history) rep.merit_history.push_back(rho * (r2 + dz2));
    if (cfg.verbose && (iter % 100 == 0 || iter == 1)) {
      std::cerr << "admm " << iter << "  r=" << r << " (" << eps_p << ")  s=" << s << " (" << eps_d
                << ")  rho=" << rho << '\n';
    }
    if (r <= eps_p && s <= eps_d) {
      rep.converged = true;
      break;
    }

    if (cfg.adapt_interval > 0 && iter % cfg.adapt_interval == 0) {
      const double rn = r / std::max(primal_scale, 1e-300);
      const double sn = s / std::max(dual_scale, 1e-300);
      double factor = 1.0;
      if (rn > cfg.adapt_ratio * sn) {
        factor = 2.0;
      } else if (sn > cfg.adapt_ratio * rn) {
        factor = 0.5;
      }
      if (factor != 1.0) {
        rho *= factor;
        for (size_t i = 0; i < nb; ++i) {
          u[i] /= factor;
          kt_u[i] /= factor;
        }
        if (cfg.record_history) rep.penalty_changes.push_back(iter);
      }
    }
  }

  rep.final_penalty = rho;
  result.x = std::move(x);
  result.z = std::move(z);
  return result;
}

WoodburySolver::WoodburySolver(double shift, LinearMap apply, LinearMap adjoint,
                               Index range_dimension, const RVector& weights)
    : shift_(shift), apply_(std::move(apply)), adjoint_(std::move(adjoint)) {
  if (!(shift > 0.0)) throw std::invalid_argument("WoodburySolver: shift must be > 0");
  RMatrix gram(range_dimension, range_dimension);
  RVector e = RVector::Zero(range_dimension);
  for (Index j = 0; j < range_dimension; ++j) {
    e(j) = 1.0;
    gram.col(j) = apply_(adjoint_(e));
    e(j) = 0.0;
  }
  factor(0.5 * (gram + gram.transpose()), weights);
}

WoodburySolver::WoodburySolver(double shift, const RMatrix& b, const RVector& weights)
    : shift_(shift) {
  if (!(shift > 0.0)) throw std::invalid_argument("WoodburySolver: shift must be > 0");
  auto shared = std::make_shared<const RMatrix>(b);
  apply_ = [shared](const RVector& v) -> RVector { return *shared * v; };
  adjoint_ = [shared](const RVector& v) -> RVector { return shared->transpose() * v; };
  factor(b * b.transpose(), weights);
}

void WoodburySolver::factor(const RMatrix& gram, const RVector& weights) {
  RMatrix m = gram;
  const Index k = gram.rows();
  if (weights.size() != 0 && weights.size() != k) {
    throw std::invalid_argument("WoodburySolver: weight vector has the wrong size");
  }
  for (Index i = 0; i < k; ++i) {
    const double w = weights.size() == 0 ? 1.0 : weights(i);
    if (!(w > 0.0)) throw std::invalid_argument("WoodburySolver: weights must be > 0");
    m(i, i) += shift_ / w;
  }
  Eigen::LLT<RMatrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("WoodburySolver: factorization failed");
  chol_ = llt.matrixL();
}

RVector WoodburySolver::solve(const RVector& r) const {
  if (chol_.rows() == 0) return r / shift_;
  RVector y = apply_(r);
  chol_.triangularView<Eigen::Lower>().solveInPlace(y);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
  return (r - adjoint_(y)) / shift_;
}

}  // namespace lrsdoa
