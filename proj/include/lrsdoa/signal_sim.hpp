// SPDX-License-Identifier: Apache-2.0
//
// Narrowband snapshot model x(n) = A(theta) s(n) + w(n) with Gaussian
// sources and structured (sparse-support) Gaussian noise.

#ifndef LRSDOA_SIGNAL_SIM_HPP_
#define LRSDOA_SIGNAL_SIM_HPP_

#include "lrsdoa/array_model.hpp"
#include "lrsdoa/hermitian.hpp"

#include <cstdint>
#include <vector>

namespace lrsdoa {

/// Noise covariance R_w together with its known support Omega.
/// Construction fails if R_w has entries outside Omega or is not PSD.
class NoiseModel {
 public:
  NoiseModel(HermitianMatrix covariance, SupportSet support);

  const HermitianMatrix& covariance() const { return covariance_; }
  const SupportSet& support() const { return support_; }
  Index dimension() const { return covariance_.dimension(); }
  /// Mean of diag(R_w); the reference level for SNR.
  double mean_noise_power() const;

 private:
  HermitianMatrix covariance_;
  SupportSet support_;
};

/// Source directions and relative covariance.
///
/// `source_cov` gives the shape of R_s (unit diagonal for equal-power
/// sources). The covariance actually used is
///   R_s = sigma_s^2 * source_cov,  sigma_s^2 = 10^(snr_db/10) * mean(diag R_w).
struct SourceScenario {
  std::vector<double> thetas_deg;
  HermitianMatrix source_cov;
  double snr_db = 0.0;
  /// Zero source power (the snr -> -inf limit).
  bool noise_only = false;

  Index source_count() const { return static_cast<Index>(thetas_deg.size()); }

  /// Throws std::invalid_argument if q >= m, dimensions disagree, angles are
  /// out of range, or source_cov is not PSD.
  void validate(Index sensors) const;

  /// Equal-power uncorrelated sources.
  static SourceScenario uncorrelated(std::vector<double> thetas_deg, double snr_db);
  /// Two equal-power sources with real correlation coefficient rho.
  static SourceScenario correlated_pair(double theta1_deg, double theta2_deg, double rho,
                                        double snr_db);
};

/// sigma_s^2 * source_cov (zero when noise_only).
HermitianMatrix effective_source_covariance(const SourceScenario& scenario,
                                            const NoiseModel& noise);

/// A R_s A^H + R_w.
HermitianMatrix exact_covariance(const SourceScenario& scenario, const NoiseModel& noise,
                                 const ArrayGeometry& geom);

/// Hermitian Toeplitz tridiagonal R_w: diag_var on the diagonal, offdiag above,
/// conj(offdiag) below. Throws std::invalid_argument (with the minimum
/// eigenvalue) if the result is not PSD.
NoiseModel tridiagonal_noise_covariance(Index sensors, double diag_var, Complex offdiag);

/// {(i, j) : |i - j| <= bandwidth}.
SupportSet band_support(Index sensors, Index bandwidth);

/// Union of diagonal blocks of the given sizes.
SupportSet block_support(const std::vector<Index>& block_sizes);

/// m x N snapshot matrix; deterministic given seed (std::mt19937_64).
CMatrix simulate_snapshots(const SourceScenario& scenario, const NoiseModel& noise,
                           const ArrayGeometry& geom, Index snapshots, std::uint64_t seed);

/// (1/N) sum_n x(n) x(n)^H.
HermitianMatrix sample_covariance(const CMatrix& snapshots);

/// Hermitian square root V sqrt(max(lambda, 0)) V^H; works for singular input.
CMatrix hermitian_sqrt(const HermitianMatrix& h);

}  // namespace lrsdoa

#endif  // LRSDOA_SIGNAL_SIM_HPP_
