// SPDX-License-Identifier: Apache-2.0
//
// Dense complex Hermitian matrices, sparse-support index sets and the real
// coordinate system the convex solvers operate in.

#ifndef LRSDOA_HERMITIAN_HPP_
#define LRSDOA_HERMITIAN_HPP_

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrsdoa {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Raised when an eigendecomposition or factorization cannot be trusted.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex square matrix kept exactly Hermitian.
///
/// The constructor symmetrizes its input as (X + X^H) / 2, so every instance
/// satisfies entries == entries^H to rounding. Positive semidefiniteness is
/// not part of the type; use checked_psd() where it is a precondition.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& entries);

  static HermitianMatrix zero(Index dimension);
  static HermitianMatrix identity(Index dimension);

  /// Symmetrizes and verifies min eigenvalue >= -rel_tol * max |eigenvalue|.
  /// Throws std::invalid_argument reporting the minimum eigenvalue otherwise.
  static HermitianMatrix checked_psd(const CMatrix& entries, double rel_tol = 1e-10);

  Index dimension() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }
  Complex operator()(Index i, Index j) const { return entries_(i, j); }

  /// Ascending real eigenvalues.
  RVector eigenvalues() const;
  bool is_psd(double rel_tol = 1e-10) const;
  double frobenius_norm() const { return entries_.norm(); }

 private:
  CMatrix entries_;
};

/// Index set of entries allowed to be nonzero in the noise covariance.
///
/// Always symmetric and always contains the full diagonal. Indices are
/// zero-based.
class SupportSet {
 public:
  SupportSet() = default;

  /// Diagonal-only support of an m x m matrix.
  explicit SupportSet(Index dimension);

  /// Builds from explicit pairs; each pair is mirrored and the diagonal is
  /// always added.
  static SupportSet from_pairs(Index dimension,
                               const std::vector<std::pair<Index, Index>>& pairs);

  /// Builds from a boolean mask; throws std::invalid_argument if the mask is
  /// not square, not symmetric, or misses a diagonal entry.
  static SupportSet from_mask(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

  Index dimension() const { return mask_.rows(); }
  bool contains(Index i, Index j) const { return mask_(i, j); }
  /// |Omega|, counting (i, j) and (j, i) separately.
  Index size() const;
  /// m^2 - |Omega|.
  Index complement_size() const { return dimension() * dimension() - size(); }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask() const { return mask_; }

  bool operator==(const SupportSet& other) const;

 private:
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
};

/// Isometric real coordinates for (a subset of the entries of) an m x m
/// Hermitian matrix.
///
/// Coordinates run over the upper triangle in column-major order. A kept
/// diagonal entry contributes its real part; a kept off-diagonal pair
/// (i < j) contributes sqrt(2) Re X_ij and sqrt(2) Im X_ij. With this
/// scaling the Euclidean norm of the coordinates equals the Frobenius norm
/// of the kept entries (both triangles), and the dot product equals
/// Re tr(X^H Y) restricted to them.
class HermitianCoordinates {
 public:
  HermitianCoordinates() = default;

  /// All m^2 coordinates.
  static HermitianCoordinates full(Index dimension);
  /// Coordinates of the entries outside Omega, i.e. the range of P_{Omega^c}.
  static HermitianCoordinates complement_of(const SupportSet& omega);
  /// Coordinates of the entries inside Omega.
  static HermitianCoordinates inside(const SupportSet& omega);

  Index dimension() const { return dim_; }
  Index size() const { return static_cast<Index>(slots_.size()); }

  RVector to_real(const CMatrix& x) const;
  /// Hermitian matrix with the listed entries set and all others zero.
  CMatrix from_real(const RVector& v) const;

  /// Position of each kept coordinate inside the full coordinate vector.
  const std::vector<Index>& full_positions() const { return full_pos_; }

 private:
  struct Slot {
    Index row;
    Index col;
    bool imag;
  };
  static HermitianCoordinates build(Index dimension,
                                    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& keep);

  Index dim_ = 0;
  std::vector<Slot> slots_;
  std::vector<Index> full_pos_;
};

}  // namespace lrsdoa

#endif  // LRSDOA_HERMITIAN_HPP_
