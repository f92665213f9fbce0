// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/crb.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrsdoa {

namespace {

constexpr double kSingularCondition = 1e13;

std::vector<std::pair<Index, Index>> upper_pairs(const SupportSet& s) {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < s.dimension(); ++i) {
    for (Index j = i + 1; j < s.dimension(); ++j) {
      if (s.contains(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

RVector encode(const CMatrix& x, const SupportSet& s) {
  const auto pairs = upper_pairs(s);
  RVector v(x.rows() + 2 * static_cast<Index>(pairs.size()));
  for (Index i = 0; i < x.rows(); ++i) v(i) = x(i, i).real();
  Index k = x.rows();
  for (const auto& [i, j] : pairs) {
    v(k++) = x(i, j).real();
    v(k++) = x(i, j).imag();
  }
  return v;
}

CMatrix decode(const RVector& v, const SupportSet& s) {
  const Index n = s.dimension();
  CMatrix x = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) x(i, i) = v(i);
  Index k = n;
  for (const auto& [i, j] : upper_pairs(s)) {
    x(i, j) = Complex(v(k), v(k + 1));
    x(j, i) = std::conj(x(i, j));
    k += 2;
  }
  return x;
}

SupportSet full_support(Index n) {
  return SupportSet::from_mask(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, true));
}

// Derivative of u R v^H-type terms: unit Hermitian basis mapped through b.
void hermitian_basis_derivatives(const CMatrix& b, const SupportSet& s, std::vector<CMatrix>& out) {
  for (Index i = 0; i < b.cols(); ++i) out.push_back(b.col(i) * b.col(i).adjoint());
  const Complex j1(0.0, 1.0);
  for (const auto& [i, j] : upper_pairs(s)) {
    const CMatrix cross = b.col(i) * b.col(j).adjoint();
    out.push_back(cross + cross.adjoint());
    out.push_back(j1 * cross - j1 * cross.adjoint());
  }
}

}  // namespace

Index ParameterVector::size() const {
  return source_count() + source_cov_params.size() + noise_params.size();
}

ParameterVector ParameterVector::from_model(const std::vector<double>& thetas_deg,
                                            const HermitianMatrix& source_cov,
                                            const HermitianMatrix& noise_cov,
                                            const SupportSet& noise_support) {
  const Index q = static_cast<Index>(thetas_deg.size());
  if (source_cov.dimension() != q) throw std::invalid_argument("ParameterVector: R_s size");
  if (noise_cov.dimension() != noise_support.dimension()) {
    throw std::invalid_argument("ParameterVector: R_w size");
  }
  return {thetas_deg, encode(source_cov.matrix(), full_support(q)),
          encode(noise_cov.matrix(), noise_support), noise_support};
}

HermitianMatrix ParameterVector::source_covariance() const {
  return HermitianMatrix(decode(source_cov_params, full_support(source_count())));
}

HermitianMatrix ParameterVector::noise_covariance() const {
  return HermitianMatrix(decode(noise_params, noise_support));
}

CVector steering_derivative(const ArrayGeometry& geom, double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg < 180.0)) {
    throw std::domain_error("steering_derivative: theta must lie in (0, 180)");
  }
  const double th = theta_deg * kDegToRad;
  const double s = std::sin(th);
  const double c = theta_deg == 90.0 ? 0.0 : std::cos(th);
  CVector d(geom.sensor_count());
  for (Index k = 0; k < d.size(); ++k) {
    const double pos = geom.positions()[static_cast<size_t>(k)];
    d(k) = Complex(0.0, -kPi * pos * s) * std::polar(1.0, kPi * pos * c);
  }
  return d;
}

std::vector<CMatrix> covariance_derivatives(const ParameterVector& params,
                                            const ArrayGeometry& geom) {
  const Index q = params.source_count();
  const Index m = geom.sensor_count();
  const CMatrix a = steering_matrix(geom, params.thetas_deg);
  const CMatrix rs = params.source_covariance().matrix();
  std::vector<CMatrix> out;
  out.reserve(static_cast<size_t>(params.size()));
  for (Index k = 0; k < q; ++k) {
    CMatrix da = CMatrix::Zero(m, q);
    da.col(k) = steering_derivative(geom, params.thetas_deg[static_cast<size_t>(k)]);
    const CMatrix t = da * rs * a.adjoint();
    out.push_back(t + t.adjoint());
  }
  hermitian_basis_derivatives(a, full_support(q), out);
  hermitian_basis_derivatives(CMatrix::Identity(m, m), params.noise_support, out);
  return out;
}

ParameterVector true_parameters(const SourceScenario& scenario, const NoiseModel& noise,
                                const CrbOptions& opts) {
  const SupportSet& support =
      opts.parameter_support.dimension() == 0 ? noise.support() : opts.parameter_support;
  if (support.dimension() != noise.dimension()) {
    throw std::invalid_argument("CrbOptions: parameter_support has the wrong size");
  }
  for (Index j = 0; j < support.dimension(); ++j) {
    for (Index i = 0; i < support.dimension(); ++i) {
      if (noise.support().contains(i, j) && !support.contains(i, j)) {
        throw std::invalid_argument("CrbOptions: parameter_support must contain the noise support");
      }
    }
  }
  return ParameterVector::from_model(scenario.thetas_deg,
                                     effective_source_covariance(scenario, noise),
                                     noise.covariance(), support);
}

RMatrix fisher_information(const SourceScenario& scenario, const NoiseModel& noise,
                           const ArrayGeometry& geom, double snapshots, const CrbOptions& opts) {
  if (!(snapshots > 0.0)) throw std::invalid_argument("fisher_information: N must be > 0");
  scenario.validate(geom.sensor_count());
  const ParameterVector params = true_parameters(scenario, noise, opts);
  const HermitianMatrix rx = exact_covariance(scenario, noise, geom);
  Eigen::LLT<CMatrix> llt(rx.matrix());
  if (llt.info() != Eigen::Success) throw NumericalError("fisher_information: R_x is singular");
  const std::vector<CMatrix> d = covariance_derivatives(params, geom);
  std::vector<CMatrix> w;
  w.reserve(d.size());
  for (const CMatrix& dk : d) w.push_back(llt.solve(dk));
  const Index p = static_cast<Index>(d.size());
  RMatrix fim(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = a; b < p; ++b) {
      // tr(W_a W_b) = sum_ij W_a(i,j) W_b(j,i)
      const double v = (w[a].transpose().cwiseProduct(w[b])).sum().real();
      fim(a, b) = fim(b, a) = snapshots * v;
    }
  }
  return fim;
}

std::vector<Index> free_parameters(const SourceScenario& scenario, const NoiseModel& noise,
                                   const CrbOptions& opts) {
  const ParameterVector params = true_parameters(scenario, noise, opts);
  const Index q = params.source_count();
  const Index m = noise.dimension();
  std::vector<Index> idx;
  for (Index k = 0; k < q; ++k) idx.push_back(k);
  Index next = q;
  if (!opts.source_cov_known) {
    for (Index k = 0; k < params.source_cov_params.size(); ++k) idx.push_back(next + k);
  }
  next += params.source_cov_params.size();
  for (Index k = 0; k < m; ++k) idx.push_back(next + k);
  next += m;
  for (const auto& [i, j] : upper_pairs(params.noise_support)) {
    if (noise.support().contains(i, j)) {
      idx.push_back(next);
      idx.push_back(next + 1);
    }
    next += 2;
  }
  return idx;
}

RVector crb_doa(const SourceScenario& scenario, const NoiseModel& noise,
                const ArrayGeometry& geom, double snapshots, const CrbOptions& opts) {
  const HermitianMatrix rs = effective_source_covariance(scenario, noise);
  const RVector ev = rs.eigenvalues();
  if (ev.size() == 0 || !(ev(0) > 1e-12 * ev.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(
        "crb_doa: source covariance is singular (coherent or zero-power sources)");
  }
  const RMatrix fim = fisher_information(scenario, noise, geom, snapshots, opts);
  const std::vector<Index> keep = free_parameters(scenario, noise, opts);
  const Index p = static_cast<Index>(keep.size());
  RMatrix f(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = 0; b < p; ++b) f(a, b) = fim(keep[a], keep[b]);
  }
  // Condition number after diagonal equilibration (parameters have mixed units).
  const RVector dinv = f.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const RMatrix fe = dinv.asDiagonal() * f * dinv.asDiagonal();
  const RVector fev = Eigen::SelfAdjointEigenSolver<RMatrix>(fe, Eigen::EigenvaluesOnly).eigenvalues();
  const double cond = fev(fev.size() - 1) / std::max(fev(0), 0.0);
  if (!(cond < kSingularCondition)) {
    std::ostringstream msg;
    msg << "crb_doa: Fisher information is numerically singular (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }
  const Index q = scenario.source_count();
  const RMatrix inv = dinv.asDiagonal() * fe.inverse() * dinv.asDiagonal();
  RVector out(q);
  for (Index k = 0; k < q; ++k) out(k) = inv(k, k) * kRadToDeg * kRadToDeg;
  return out;
}

}  // namespace lrsdoa
