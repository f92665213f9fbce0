// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/hermitian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace lrsdoa {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& entries) {
  if (entries.rows() != entries.cols()) {
    throw std::invalid_argument("HermitianMatrix: matrix is not square");
  }
  entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Index dimension) {
  return HermitianMatrix(CMatrix::Zero(dimension, dimension));
}

HermitianMatrix HermitianMatrix::identity(Index dimension) {
  return HermitianMatrix(CMatrix::Identity(dimension, dimension));
}

HermitianMatrix HermitianMatrix::checked_psd(const CMatrix& entries, double rel_tol) {
  HermitianMatrix h(entries);
  if (h.dimension() == 0) return h;
  const RVector ev = h.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (ev(0) < -rel_tol * scale) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite: minimum eigenvalue " << ev(0);
    throw std::invalid_argument(msg.str());
  }
  return h;
}

RVector HermitianMatrix::eigenvalues() const {
  if (dimension() == 0) return RVector();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("HermitianMatrix: eigenvalue computation failed");
  }
  return solver.eigenvalues();
}

bool HermitianMatrix::is_psd(double rel_tol) const {
  if (dimension() == 0) return true;
  const RVector ev = eigenvalues();
  return ev(0) >= -rel_tol * ev.cwiseAbs().maxCoeff();
}

SupportSet::SupportSet(Index dimension) {
  mask_.setConstant(dimension, dimension, false);
  for (Index i = 0; i < dimension; ++i) mask_(i, i) = true;
}

SupportSet SupportSet::from_pairs(Index dimension,
                                  const std::vector<std::pair<Index, Index>>& pairs) {
  SupportSet s(dimension);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= dimension || j >= dimension) {
      throw std::invalid_argument("SupportSet: index pair out of range");
    }
    s.mask_(i, j) = true;
    s.mask_(j, i) = true;
  }
  return s;
}

SupportSet SupportSet::from_mask(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  if (mask.rows() != mask.cols()) throw std::invalid_argument("SupportSet: mask is not square");
  for (Index j = 0; j < mask.cols(); ++j) {
    if (!mask(j, j)) throw std::invalid_argument("SupportSet: diagonal entry missing");
    for (Index i = 0; i < j; ++i) {
      if (mask(i, j) != mask(j, i)) throw std::invalid_argument("SupportSet: mask is not symmetric");
    }
  }
  SupportSet s;
  s.mask_ = mask;
  return s;
}

Index SupportSet::size() const {
  return mask_.cast<Index>().sum();
}

bool SupportSet::operator==(const SupportSet& other) const {
  return mask_.rows() == other.mask_.rows() && mask_ == other.mask_;
}

HermitianCoordinates HermitianCoordinates::build(
    Index dimension, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& keep) {
  HermitianCoordinates c;
  c.dim_ = dimension;
  Index full = 0;
  for (Index j = 0; j < dimension; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const bool kept = keep(i, j);
      if (i == j) {
        if (kept) {
          c.slots_.push_back({i, j, false});
          c.full_pos_.push_back(full);
        }
        ++full;
      } else {
        if (kept) {
          c.slots_.push_back({i, j, false});
          c.full_pos_.push_back(full);
          c.slots_.push_back({i, j, true});
          c.full_pos_.push_back(full + 1);
        }
        full += 2;
      }
    }
  }
  return c;
}

HermitianCoordinates HermitianCoordinates::full(Index dimension) {
  return build(dimension, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                              dimension, dimension, true));
}

HermitianCoordinates HermitianCoordinates::complement_of(const SupportSet& omega) {
  return build(omega.dimension(), omega.mask().unaryExpr([](bool b) { return !b; }));
}

HermitianCoordinates HermitianCoordinates::inside(const SupportSet& omega) {
  return build(omega.dimension(), omega.mask());
}

RVector HermitianCoordinates::to_real(const CMatrix& x) const {
  RVector v(size());
  for (Index k = 0; k < size(); ++k) {
    const Slot& s = slots_[static_cast<size_t>(k)];
    if (s.row == s.col) {
      v(k) = x(s.row, s.col).real();
    } else {
      // Average both triangles so slightly non-Hermitian input maps to its
      // Hermitian part.
      const Complex z = 0.5 * (x(s.row, s.col) + std::conj(x(s.col, s.row)));
      v(k) = kSqrt2 * (s.imag ? z.imag() : z.real());
    }
  }
  return v;
}

CMatrix HermitianCoordinates::from_real(const RVector& v) const {
  if (v.size() != size()) throw std::invalid_argument("HermitianCoordinates: size mismatch");
  CMatrix x = CMatrix::Zero(dim_, dim_);
  for (Index k = 0; k < size(); ++k) {
    const Slot& s = slots_[static_cast<size_t>(k)];
    if (s.row == s.col) {
      x(s.row, s.col) = v(k);
    } else {
      const double val = v(k) / kSqrt2;
      if (s.imag) {
        x(s.row, s.col) += Complex(0.0, val);
        x(s.col, s.row) += Complex(0.0, -val);
      } else {
        x(s.row, s.col) += val;
        x(s.col, s.row) += val;
      }
    }
  }
  return x;
}

}  // namespace lrsdoa
