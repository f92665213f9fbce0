// SPDX-License-Identifier: Apache-2.0
//
// From solver output to DOA estimates: grid spectra, peak picking and the
// two-stage (coarse grid, then refined grid) procedure for correlated sources.

#ifndef LRSDOA_DOA_PIPELINE_HPP_
#define LRSDOA_DOA_PIPELINE_HPP_

#include "lrsdoa/admm.hpp"
#include "lrsdoa/array_model.hpp"
#include "lrsdoa/hermitian.hpp"
#include "lrsdoa/solvers.hpp"

#include <vector>

namespace lrsdoa {

struct SpatialSpectrum {
  AngularGrid grid;
  RVector power;  // >= 0, one entry per grid point

  SpatialSpectrum(AngularGrid g, RVector p);
};

struct DoaEstimate {
  std::vector<double> angles_deg;  // ascending
  std::vector<double> powers;      // matches angles_deg
  /// Fewer peaks than requested were found.
  bool shortfall = false;
  /// Every solver call behind this estimate converged.
  bool converged = true;
};

/// Real part of diag(P), clipped at zero.
SpatialSpectrum spectrum_from_matrix(const HermitianMatrix& p_hat, const AngularGrid& grid);

/// Pass as `count` to find_peaks to select peaks by relative height instead.
inline constexpr Index kAutoPeakCount = 0;

/// Local maxima of the spectrum. A peak is a maximal run of equal values that
/// is strictly above both neighbours (grid ends count as -inf) and has
/// positive power; runs report their centre index (lower centre for even
/// lengths). Peaks are ranked by power, ties to the lower angle. With
/// count >= 1 the strongest `count` are returned; with kAutoPeakCount every
/// peak of at least min_rel_height * max power is returned.
DoaEstimate find_peaks(const SpatialSpectrum& spectrum, Index count, double min_rel_height = 0.1);

struct TwoStageOptions {
  Index sources = 2;
  double coarse_step_deg = 2.5;
  double fine_step_deg = 0.5;
  double margin_deg = 3.0;
};

struct TwoStageResult {
  HermitianMatrix l_hat;
  DoaEstimate coarse;
  DoaEstimate fine;
  /// Stage-two search interval.
  double fine_lo_deg = 0.0;
  double fine_hi_deg = 0.0;
};

/// Low-rank completion, then sparse source covariance on a coarse grid; the
/// sparse step is repeated on a fine grid spanning the coarse peaks +- margin,
/// against the same low-rank estimate.
TwoStageResult coarse_to_fine_stages(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                     const ArrayGeometry& geom, const RegularizationSet& regs,
                                     const SolverConfig& cfg, const TwoStageOptions& opts = {});

DoaEstimate coarse_to_fine_correlated(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                      const ArrayGeometry& geom, const RegularizationSet& regs,
                                      const SolverConfig& cfg, const TwoStageOptions& opts = {});

/// Nonnegative square-root lasso on the grid, then the `sources` strongest
/// peaks of the recovered powers (kAutoPeakCount: relative-height rule).
/// Angles are grid points.
DoaEstimate estimate_doas_uncorrelated(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                       const ArrayGeometry& geom, const AngularGrid& grid,
                                       double lambda_u, Index sources, const SolverConfig& cfg);

}  // namespace lrsdoa

#endif  // LRSDOA_DOA_PIPELINE_HPP_
