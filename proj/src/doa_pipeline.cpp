// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/doa_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lrsdoa {

namespace {

constexpr double kClip = 1e-12;

}  // namespace

SpatialSpectrum::SpatialSpectrum(AngularGrid g, RVector p) : grid(std::move(g)), power(std::move(p)) {
  if (power.size() != grid.size()) throw std::invalid_argument("SpatialSpectrum: size mismatch");
  const double top = power.size() > 0 ? power.cwiseAbs().maxCoeff() : 0.0;
  for (Index k = 0; k < power.size(); ++k) {
    if (!std::isfinite(power(k))) throw NumericalError("SpatialSpectrum: non-finite power");
    if (power(k) < 0.0) {
      if (power(k) < -kClip * std::max(top, 1.0)) {
        throw std::invalid_argument("SpatialSpectrum: negative power");
      }
      power(k) = 0.0;
    }
  }
}

SpatialSpectrum spectrum_from_matrix(const HermitianMatrix& p_hat, const AngularGrid& grid) {
  if (p_hat.dimension() != grid.size()) {
    throw std::invalid_argument("spectrum_from_matrix: matrix size does not match the grid");
  }
  return SpatialSpectrum(grid, p_hat.matrix().diagonal().real().cwiseMax(0.0));
}

DoaEstimate find_peaks(const SpatialSpectrum& spectrum, Index count, double min_rel_height) {
  if (count < 0) throw std::invalid_argument("find_peaks: count must be >= 0");
  if (count == kAutoPeakCount && !(min_rel_height > 0.0 && min_rel_height < 1.0)) {
    throw std::invalid_argument("find_peaks: min_rel_height must lie in (0, 1)");
  }
  const RVector& p = spectrum.power;
  const Index n = p.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<Index> peaks;
  Index start = 0;
  while (start < n) {
    Index end = start;
    while (end + 1 < n && p(end + 1) == p(start)) ++end;
    const double left = start > 0 ? p(start - 1) : neg_inf;
    const double right = end + 1 < n ? p(end + 1) : neg_inf;
    if (p(start) > 0.0 && p(start) > left && p(start) > right) {
      peaks.push_back(start + (end - start) / 2);
    }
    start = end + 1;
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](Index a, Index b) { return p(a) > p(b); });

  DoaEstimate est;
  if (count == kAutoPeakCount) {
    if (!peaks.empty()) {
      const double floor = min_rel_height * p(peaks.front());
      peaks.erase(std::remove_if(peaks.begin(), peaks.end(), [&](Index k) { return p(k) < floor; }),
                  peaks.end());
    }
  } else {
    est.shortfall = static_cast<Index>(peaks.size()) < count;
    if (!est.shortfall) peaks.resize(static_cast<size_t>(count));
  }
  std::sort(peaks.begin(), peaks.end());
  for (Index k : peaks) {
    est.angles_deg.push_back(spectrum.grid[k]);
    est.powers.push_back(p(k));
  }
  return est;
}

TwoStageResult coarse_to_fine_stages(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                     const ArrayGeometry& geom, const RegularizationSet& regs,
                                     const SolverConfig& cfg, const TwoStageOptions& opts) {
  if (opts.sources < 1) throw std::invalid_argument("coarse_to_fine: need at least one source");
  if (!(opts.coarse_step_deg > 0.0 && opts.fine_step_deg > 0.0 && opts.margin_deg >= 0.0)) {
    throw std::invalid_argument("coarse_to_fine: grid steps must be > 0 and margin >= 0");
  }
  TwoStageResult out;
  MatrixEstimate low = solve_lowrank_completion(rx_hat, omega, regs.lambda1, cfg);
  out.l_hat = low.estimate;

  const AngularGrid coarse = AngularGrid::spanning(0.0, 180.0, opts.coarse_step_deg);
  MatrixEstimate p1 =
      solve_sparse_source_cov(out.l_hat, manifold_matrix(geom, coarse), regs.lambda2, cfg);
  out.coarse = find_peaks(spectrum_from_matrix(p1.estimate, coarse), opts.sources);
  out.coarse.converged = low.report.converged && p1.report.converged;
  if (out.coarse.angles_deg.empty()) {
    out.fine = out.coarse;
    return out;
  }

  out.fine_lo_deg = std::max(0.0, out.coarse.angles_deg.front() - opts.margin_deg);
  out.fine_hi_deg = std::min(180.0, out.coarse.angles_deg.back() + opts.margin_deg);
  const AngularGrid fine = AngularGrid::spanning(out.fine_lo_deg, out.fine_hi_deg, opts.fine_step_deg);
  MatrixEstimate p2 =
      solve_sparse_source_cov(out.l_hat, manifold_matrix(geom, fine), regs.lambda2, cfg);
  out.fine = find_peaks(spectrum_from_matrix(p2.estimate, fine), opts.sources);
  out.fine.shortfall = out.fine.shortfall || out.coarse.shortfall;
  out.fine.converged = out.coarse.converged && p2.report.converged;
  return out;
}

DoaEstimate coarse_to_fine_correlated(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                      const ArrayGeometry& geom, const RegularizationSet& regs,
                                      const SolverConfig& cfg, const TwoStageOptions& opts) {
  return coarse_to_fine_stages(rx_hat, omega, geom, regs, cfg, opts).fine;
}

DoaEstimate estimate_doas_uncorrelated(const HermitianMatrix& rx_hat, const SupportSet& omega,
                                       const ArrayGeometry& geom, const AngularGrid& grid,
                                       double lambda_u, Index sources, const SolverConfig& cfg) {
  if (sources < 0) throw std::invalid_argument("estimate_doas_uncorrelated: sources must be >= 0");
  VectorEstimate p = solve_uncorrelated(rx_hat, omega, manifold_matrix(geom, grid), lambda_u, cfg);
  DoaEstimate est = find_peaks(SpatialSpectrum(grid, p.estimate), sources);
  est.converged = p.report.converged;
  return est;
}

}  // namespace lrsdoa
