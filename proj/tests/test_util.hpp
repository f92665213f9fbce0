// SPDX-License-Identifier: Apache-2.0
#ifndef LRSDOA_TESTS_TEST_UTIL_HPP_
#define LRSDOA_TESTS_TEST_UTIL_HPP_

#include "lrsdoa/hermitian.hpp"

#include <Eigen/QR>

#include <random>

namespace testutil {

using lrsdoa::CMatrix;
using lrsdoa::Complex;
using lrsdoa::CVector;
using lrsdoa::Index;
using lrsdoa::RVector;

inline CMatrix random_complex(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd;
  CMatrix x(rows, cols);
  for (Index k = 0; k < x.size(); ++k) {
    const double re = nd(rng);
    const double im = nd(rng);
    x(k) = Complex(re, im);
  }
  return x;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, Index n) {
  const CMatrix g = random_complex(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

inline CMatrix random_psd(std::mt19937_64& rng, Index n, Index rank) {
  const CMatrix g = random_complex(rng, n, rank);
  return g * g.adjoint();
}

inline CMatrix random_unitary(std::mt19937_64& rng, Index n) {
  Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, n, n));
  return qr.householderQ() * CMatrix::Identity(n, n);
}

inline RVector random_real(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd;
  RVector v(n);
  for (Index k = 0; k < n; ++k) v(k) = nd(rng);
  return v;
}

inline RVector sorted_eigenvalues(const CMatrix& h) {
  return lrsdoa::HermitianMatrix(h).eigenvalues();
}

}  // namespace testutil

#endif  // LRSDOA_TESTS_TEST_UTIL_HPP_
