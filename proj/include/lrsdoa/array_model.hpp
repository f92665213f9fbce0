// SPDX-License-Identifier: Apache-2.0
//
// Linear array geometry, steering vectors and sampled array manifolds.
//
// Conventions used throughout the library:
//  - sensor positions are in half-wavelength units, so a ULA has spacing 1;
//  - angles are in degrees, measured from the array axis (broadside = 90);
//  - a_k(theta) = exp(j * pi * position_k * cos(theta));
//  - matrices are vectorized column-major.

#ifndef LRSDOA_ARRAY_MODEL_HPP_
#define LRSDOA_ARRAY_MODEL_HPP_

#include "lrsdoa/hermitian.hpp"

#include <vector>

namespace lrsdoa {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

class ArrayGeometry {
 public:
  /// Positions must be strictly increasing with at least two sensors.
  explicit ArrayGeometry(std::vector<double> positions);

  /// m sensors at positions 0, 1, ..., m-1.
  static ArrayGeometry uniform_linear(Index sensors);

  Index sensor_count() const { return static_cast<Index>(positions_.size()); }
  const std::vector<double>& positions() const { return positions_; }

 private:
  std::vector<double> positions_;
};

/// Candidate directions, strictly increasing inside [0, 180).
class AngularGrid {
 public:
  explicit AngularGrid(std::vector<double> angles_deg);

  /// M points k * 180 / M, k = 0..M-1.
  static AngularGrid uniform(Index points);

  /// lo, lo + step, ... up to hi (inclusive within 1e-9), clipped to [0, 180).
  static AngularGrid spanning(double lo_deg, double hi_deg, double step_deg);

  Index size() const { return static_cast<Index>(angles_.size()); }
  double operator[](Index k) const { return angles_[static_cast<size_t>(k)]; }
  const std::vector<double>& angles() const { return angles_; }

 private:
  std::vector<double> angles_;
};

/// a(theta); throws std::domain_error unless 0 <= theta < 180.
CVector steering_vector(const ArrayGeometry& geom, double theta_deg);

/// [a(theta_1), ..., a(theta_q)] for arbitrary directions.
CMatrix steering_matrix(const ArrayGeometry& geom, const std::vector<double>& thetas_deg);

/// Sampled manifold A~ (m x M), column k = a(grid[k]).
CMatrix manifold_matrix(const ArrayGeometry& geom, const AngularGrid& grid);

/// Column k = conj(a_k) (x) a_k, so that (A~* . A~) p = vec(A~ diag(p) A~^H).
CMatrix khatri_rao_manifold(const CMatrix& a_tilde);

/// Column-major vectorization.
CVector vectorize(const CMatrix& x);

}  // namespace lrsdoa

#endif  // LRSDOA_ARRAY_MODEL_HPP_
