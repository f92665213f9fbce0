// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/proximal.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrsdoa {

namespace {

void require_nonneg(double t, const char* who) {
  if (!(t >= 0.0)) throw std::invalid_argument(std::string(who) + ": threshold must be >= 0");
}

// Shared spectral map: eigenvalues lambda -> max(lambda - shift, 0), with
// values below eig_tolerance * spectral radius treated as zero.
CMatrix shrink_spectrum(const CMatrix& h, double shift, const ProxConfig& cfg) {
  if (h.rows() != h.cols()) throw std::invalid_argument("spectral prox: matrix is not square");
  if (h.size() == 0) return h;
  if (!h.allFinite()) throw NumericalError("spectral prox: input has non-finite entries");
  const CMatrix sym = cfg.symmetrize ? CMatrix(0.5 * (h + h.adjoint())) : h;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "spectral prox: eigendecomposition failed (n = " << h.rows()
        << ", |H|_F = " << h.norm() << ")";
    throw NumericalError(msg.str());
  }
  const RVector& ev = es.eigenvalues();
  const double cutoff = cfg.eig_tolerance * ev.cwiseAbs().maxCoeff();
  RVector kept(ev.size());
  Index first = ev.size();
  for (Index i = 0; i < ev.size(); ++i) {
    const double v = ev(i) - shift;
    kept(i) = v > cutoff ? v : 0.0;
    if (kept(i) > 0.0 && first == ev.size()) first = i;
  }
  const Index rank = ev.size() - first;
  if (rank == 0) return CMatrix::Zero(h.rows(), h.cols());
  // Eigenvalues are ascending, so the kept ones are the trailing block.
  const auto v = es.eigenvectors().rightCols(rank);
  CMatrix out = v * kept.tail(rank).asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

CMatrix support_projection(const CMatrix& x, const SupportSet& omega, bool keep_complement) {
  if (x.rows() != omega.dimension() || x.cols() != omega.dimension()) {
    throw std::invalid_argument("support_projection: dimension mismatch");
  }
  CMatrix out = x;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (omega.contains(i, j) == keep_complement) out(i, j) = 0.0;
    }
  }
  return out;
}

CMatrix project_psd(const CMatrix& h, const ProxConfig& cfg) {
  return shrink_spectrum(h, 0.0, cfg);
}

HermitianMatrix project_psd(const HermitianMatrix& h, const ProxConfig& cfg) {
  return HermitianMatrix(shrink_spectrum(h.matrix(), 0.0, cfg));
}

CMatrix prox_nuclear_psd(const CMatrix& h, double t, const ProxConfig& cfg) {
  require_nonneg(t, "prox_nuclear_psd");
  return shrink_spectrum(h, t, cfg);
}

HermitianMatrix prox_nuclear_psd(const HermitianMatrix& h, double t, const ProxConfig& cfg) {
  require_nonneg(t, "prox_nuclear_psd");
  return HermitianMatrix(shrink_spectrum(h.matrix(), t, cfg));
}

RVector prox_l1_nonneg(const RVector& v, double t) {
  require_nonneg(t, "prox_l1_nonneg");
  return (v.array() - t).max(0.0).matrix();
}

CMatrix soft_threshold_entries(const CMatrix& x, double t) {
  require_nonneg(t, "soft_threshold_entries");
  CMatrix out(x.rows(), x.cols());
  for (Index k = 0; k < x.size(); ++k) {
    const double mag = std::abs(x(k));
    out(k) = mag > t ? x(k) * (1.0 - t / mag) : Complex(0.0, 0.0);
  }
  return out;
}

HermitianMatrix prox_l1_psd_matrix(const HermitianMatrix& s, double t, const ProxConfig& cfg) {
  return HermitianMatrix(shrink_spectrum(soft_threshold_entries(s.matrix(), t), 0.0, cfg));
}

RVector prox_l2_block(const RVector& v, double t) {
  require_nonneg(t, "prox_l2_block");
  const double n = v.norm();
  if (n <= t) return RVector::Zero(v.size());
  return v * (1.0 - t / n);
}

CVector prox_l2_block(const CVector& v, double t) {
  require_nonneg(t, "prox_l2_block");
  const double n = v.norm();
  if (n <= t) return CVector::Zero(v.size());
  return v * (1.0 - t / n);
}

}  // namespace lrsdoa
