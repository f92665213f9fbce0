// SPDX-License-Identifier: Apache-2.0
//
// Stochastic Cramer-Rao bound for DOAs under x ~ CN(0, A R_s A^H + R_w) with
// R_s and the on-support entries of R_w unknown.

#ifndef LRSDOA_CRB_HPP_
#define LRSDOA_CRB_HPP_

#include "lrsdoa/array_model.hpp"
#include "lrsdoa/hermitian.hpp"
#include "lrsdoa/signal_sim.hpp"

#include <vector>

namespace lrsdoa {

/// Real parameterization of (theta, R_s, R_w).
///
/// Ordering: thetas; then R_s as its diagonal followed by (Re, Im) of every
/// upper entry (i < j, row-major); then R_w as its diagonal followed by
/// (Re, Im) of every upper entry of `noise_support`.
struct ParameterVector {
  std::vector<double> thetas_deg;
  RVector source_cov_params;
  RVector noise_params;
  SupportSet noise_support;

  Index source_count() const { return static_cast<Index>(thetas_deg.size()); }
  Index size() const;

  static ParameterVector from_model(const std::vector<double>& thetas_deg,
                                    const HermitianMatrix& source_cov,
                                    const HermitianMatrix& noise_cov,
                                    const SupportSet& noise_support);
  HermitianMatrix source_covariance() const;
  HermitianMatrix noise_covariance() const;
};

struct CrbOptions {
  /// Treat R_s as known (drops its parameters from the bound).
  bool source_cov_known = false;
  /// Support used to parameterize R_w. Must contain the model support;
  /// parameters outside the model support are held fixed at their true
  /// value (zero). Empty means the model support.
  SupportSet parameter_support;
};

/// d a(theta) / d theta in radians^-1. Requires 0 < theta < 180.
CVector steering_derivative(const ArrayGeometry& geom, double theta_deg);

/// dR_x / d alpha_k for every parameter, in ParameterVector order
/// (theta derivatives per radian).
std::vector<CMatrix> covariance_derivatives(const ParameterVector& params,
                                            const ArrayGeometry& geom);

/// The ParameterVector describing the scenario at its true values.
ParameterVector true_parameters(const SourceScenario& scenario, const NoiseModel& noise,
                                const CrbOptions& opts = {});

/// FIM_ab = N Re tr(R^-1 dR_a R^-1 dR_b) over the full ParameterVector
/// (theta entries per radian). Throws NumericalError if R_x is singular.
RMatrix fisher_information(const SourceScenario& scenario, const NoiseModel& noise,
                           const ArrayGeometry& geom, double snapshots,
                           const CrbOptions& opts = {});

/// Indices of the parameters that are estimated (not held fixed).
std::vector<Index> free_parameters(const SourceScenario& scenario, const NoiseModel& noise,
                                   const CrbOptions& opts = {});

/// Per-source CRB in degrees^2. Throws std::invalid_argument for singular
/// R_s (e.g. coherent sources) and NumericalError, with the condition number,
/// when the free-parameter FIM is numerically singular.
RVector crb_doa(const SourceScenario& scenario, const NoiseModel& noise,
                const ArrayGeometry& geom, double snapshots, const CrbOptions& opts = {});

}  // namespace lrsdoa

#endif  // LRSDOA_CRB_HPP_
