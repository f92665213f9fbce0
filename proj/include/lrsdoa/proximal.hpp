// SPDX-License-Identifier: Apache-2.0
//
// Proximal operators and projections used by the convex solvers.
// prox_{t f}(v) = argmin_z t f(z) + 1/2 ||z - v||^2.

#ifndef LRSDOA_PROXIMAL_HPP_
#define LRSDOA_PROXIMAL_HPP_

#include "lrsdoa/hermitian.hpp"

namespace lrsdoa {

struct ProxConfig {
  /// Eigenvalues below eig_tolerance * spectral radius are set to zero.
  double eig_tolerance = 1e-12;
  /// Symmetrize inputs before eigendecomposition. Inputs typed as
  /// HermitianMatrix are already symmetric, so this only matters for the
  /// raw-matrix overloads.
  bool symmetrize = true;
};

/// keep_complement: P_{Omega^c}(X), entries in Omega zeroed.
/// otherwise:       P_{Omega}(X), entries outside Omega zeroed.
CMatrix support_projection(const CMatrix& x, const SupportSet& omega, bool keep_complement);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
HermitianMatrix project_psd(const HermitianMatrix& h, const ProxConfig& cfg = {});
CMatrix project_psd(const CMatrix& h, const ProxConfig& cfg = {});

/// prox of t ||.||_* + indicator(PSD): eigenvalues lambda -> max(lambda - t, 0).
HermitianMatrix prox_nuclear_psd(const HermitianMatrix& h, double t, const ProxConfig& cfg = {});
CMatrix prox_nuclear_psd(const CMatrix& h, double t, const ProxConfig& cfg = {});

/// prox of t ||.||_1 + indicator(v >= 0): max(v_i - t, 0).
RVector prox_l1_nonneg(const RVector& v, double t);

/// Entrywise complex soft threshold s -> s * max(1 - t / |s|, 0); the exact
/// prox of t * sum_ij |X_ij| over Hermitian matrices.
CMatrix soft_threshold_entries(const CMatrix& x, double t);

/// Soft threshold followed by PSD projection. An approximation of the prox
/// of t ||.||_1 + indicator(PSD), which has no closed form; the solvers use
/// an exact splitting instead whenever both terms appear.
HermitianMatrix prox_l1_psd_matrix(const HermitianMatrix& s, double t, const ProxConfig& cfg = {});

/// Block soft threshold v * max(1 - t / ||v||, 0); prox of t ||.||_2.
RVector prox_l2_block(const RVector& v, double t);
CVector prox_l2_block(const CVector& v, double t);

}  // namespace lrsdoa

#endif  // LRSDOA_PROXIMAL_HPP_
