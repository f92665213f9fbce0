// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/proximal.hpp"
#include "lrsdoa/signal_sim.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace lrsdoa;
using testutil::random_hermitian;
using testutil::random_psd;

namespace {

CMatrix diag3(double a, double b, double c) {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = a;
  d(1, 1) = b;
  d(2, 2) = c;
  return d;
}

double nuclear(const CMatrix& h) { return HermitianMatrix(h).eigenvalues().cwiseAbs().sum(); }

}  // namespace

TEST_SUITE("proximal") {

TEST_CASE("support projection") {
  std::mt19937_64 rng(1);
  const CMatrix x = testutil::random_complex(rng, 5, 5);
  const SupportSet full = band_support(5, 4);
  CHECK(support_projection(x, full, true).norm() == 0.0);
  const CMatrix id = CMatrix::Identity(5, 5);
  CHECK(support_projection(id, SupportSet(5), true).norm() == 0.0);
  CHECK((support_projection(id, SupportSet(5), false) - id).norm() == 0.0);

  const SupportSet omega = band_support(5, 1);
  const CMatrix pin = support_projection(x, omega, false);
  const CMatrix pout = support_projection(x, omega, true);
  CHECK((pin + pout - x).norm() == 0.0);
  CHECK(support_projection(pin, omega, true).norm() == 0.0);
  CHECK((support_projection(pout, omega, true) - pout).norm() == 0.0);
  const CMatrix y = testutil::random_complex(rng, 5, 5);
  const CMatrix lin = support_projection(2.0 * x - 3.0 * y, omega, true) -
                      (2.0 * support_projection(x, omega, true) - 3.0 * support_projection(y, omega, true));
  CHECK(lin.norm() < 1e-14);
  CHECK_THROWS_AS(support_projection(CMatrix::Zero(4, 4), omega, true), std::invalid_argument);
}

TEST_CASE("PSD projection: fixed points, clipping, optimality, idempotence") {
  std::mt19937_64 rng(2);
  const CMatrix p = random_psd(rng, 6, 6);
  CHECK((project_psd(p) - p).norm() <= 1e-12 * p.norm());
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK((project_psd(d) - expect).norm() < 1e-15);

  for (int t = 0; t < 5; ++t) {
    const CMatrix h = random_hermitian(rng, 5);
    const CMatrix ph = project_psd(h);
    CHECK(testutil::sorted_eigenvalues(ph)(0) >= -1e-12 * ph.norm());
    CHECK((project_psd(ph) - ph).norm() <= 1e-10 * std::max(1.0, ph.norm()));
    for (int k = 0; k < 100; ++k) {
      const CMatrix cand = random_psd(rng, 5, 1 + k % 5) * 0.3;
      CHECK((ph - h).norm() <= (cand - h).norm() + 1e-12);
    }
  }
}

TEST_CASE("nuclear-norm prox on the PSD cone") {
  std::mt19937_64 rng(3);
  const CMatrix h = random_hermitian(rng, 4);
  CHECK((prox_nuclear_psd(h, 0.0) - project_psd(h)).norm() < 1e-12);
  CHECK((prox_nuclear_psd(diag3(3, 1, -2), 1.5) - diag3(1.5, 0, 0)).norm() < 1e-14);
  CHECK_THROWS_AS(prox_nuclear_psd(h, -1.0), std::invalid_argument);

  const double t = 0.3;
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix p = random_psd(rng, 4, 2);
    const CMatrix z = prox_nuclear_psd(p, t);
    const double best = t * nuclear(z) + 0.5 * (z - p).squaredNorm();
    for (int k = 0; k < 50; ++k) {
      const CMatrix cand = z + 0.05 * random_psd(rng, 4, 1) - 0.05 * random_psd(rng, 4, 1);
      const CMatrix c = project_psd(cand);
      CHECK(best <= t * nuclear(c) + 0.5 * (c - p).squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("nuclear-norm prox commutes with unitary conjugation") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix h = random_hermitian(rng, 5);
    const CMatrix u = testutil::random_unitary(rng, 5);
    const RVector a = testutil::sorted_eigenvalues(prox_nuclear_psd(h, 0.4));
    const RVector b = testutil::sorted_eigenvalues(prox_nuclear_psd(u * h * u.adjoint(), 0.4));
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
    const CMatrix direct = prox_nuclear_psd(u * h * u.adjoint(), 0.4);
    CHECK((direct - u * prox_nuclear_psd(h, 0.4) * u.adjoint()).norm() <= 1e-9);
  }
}

TEST_CASE("non-finite input raises a numerical error") {
  CMatrix h = CMatrix::Identity(2, 2);
  h(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(project_psd(h), NumericalError);
}

TEST_CASE("nonnegative l1 prox") {
  RVector v(3);
  v << 2.0, -1.0, 0.5;
  const RVector out = prox_l1_nonneg(v, 1.0);
  CHECK(out(0) == 1.0);
  CHECK(out(1) == 0.0);
  CHECK(out(2) == 0.0);
  RVector pos(3);
  pos << 0.0, 1.0, 3.0;
  CHECK((prox_l1_nonneg(pos, 0.0) - pos).norm() == 0.0);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const RVector w = testutil::random_real(rng, 8);
    const RVector p = prox_l1_nonneg(w, 0.7);
    CHECK(p.minCoeff() >= 0.0);
    CHECK((p - w.cwiseMax(0.0)).cwiseAbs().maxCoeff() <= 0.7 + 1e-15);
  }
}

TEST_CASE("l1 + PSD matrix prox") {
  std::mt19937_64 rng(6);
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  d(2, 2) = 0.5;
  CHECK((prox_l1_psd_matrix(HermitianMatrix(d), 1.0).matrix() - diag3(1.0, 0.0, 0.0)).norm() < 1e-14);
  const CMatrix h = random_hermitian(rng, 4);
  CHECK((prox_l1_psd_matrix(HermitianMatrix(h), 0.0).matrix() - project_psd(h)).norm() < 1e-12);
}

TEST_CASE("l1 + PSD matrix prox matches a brute-force search on real 2x2 matrices") {
  // Exact prox of t||S||_1 + PSD indicator at [[a, c], [c, b]], searched over
  // PSD [[x, z], [z, y]] by nested grid refinement.
  const double t = 0.2;
  const double cases[][3] = {{1.0, 0.8, 0.1}, {0.9, 1.3, -0.15}, {2.0, 0.7, 0.3}};
  for (const auto& cs : cases) {
    const double a = cs[0], b = cs[1], c = cs[2];
    auto f = [&](double x, double y, double z) {
      if (x < 0 || y < 0 || x * y < z * z) return std::numeric_limits<double>::infinity();
      return t * (std::abs(x) + std::abs(y) + 2 * std::abs(z)) +
             0.5 * ((x - a) * (x - a) + (y - b) * (y - b) + 2 * (z - c) * (z - c));
    };
    double bx = a, by = b, bz = 0.0, bf = f(bx, by, bz);
    double step = 0.1;
    for (int level = 0; level < 14; ++level) {
      const double cx = bx, cy = by, cz = bz;
      for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j)
          for (int k = -10; k <= 10; ++k) {
            const double x = cx + i * step, y = cy + j * step, z = cz + k * step;
            const double v = f(x, y, z);
            if (v < bf) bf = v, bx = x, by = y, bz = z;
          }
      step /= 4.0;
    }
    CMatrix s(2, 2);
    s << a, c, c, b;
    const CMatrix got = prox_l1_psd_matrix(HermitianMatrix(s), t).matrix();
    CHECK(std::abs(got(0, 0).real() - bx) <= 1e-6);
    CHECK(std::abs(got(1, 1).real() - by) <= 1e-6);
    CHECK(std::abs(got(0, 1).real() - bz) <= 1e-6);
  }
}

TEST_CASE("block soft threshold") {
  RVector v(2);
  v << 0.3, -0.4;
  CHECK(prox_l2_block(v, 0.5).norm() == 0.0);
  CHECK((prox_l2_block(v, 0.0) - v).norm() == 0.0);
  CVector w(2);
  w << Complex(0, 2), Complex(0, 0);
  const CVector o = prox_l2_block(w, 0.5);
  CHECK(o.norm() == doctest::Approx(1.5));
  CHECK(std::abs(o(0) - Complex(0, 1.5)) < 1e-15);
  CHECK_THROWS_AS(prox_l2_block(v, -0.1), std::invalid_argument);
}

TEST_CASE("every prox is nonexpansive") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const CMatrix x = random_hermitian(rng, 5), y = random_hermitian(rng, 5);
    const double d = (x - y).norm();
    CHECK((project_psd(x) - project_psd(y)).norm() <= d + 1e-10);
    CHECK((prox_nuclear_psd(x, 0.3) - prox_nuclear_psd(y, 0.3)).norm() <= d + 1e-10);
    CHECK((soft_threshold_entries(x, 0.3) - soft_threshold_entries(y, 0.3)).norm() <= d + 1e-10);
    const RVector u = testutil::random_real(rng, 7), v = testutil::random_real(rng, 7);
    CHECK((prox_l1_nonneg(u, 0.3) - prox_l1_nonneg(v, 0.3)).norm() <= (u - v).norm() + 1e-10);
    CHECK((prox_l2_block(u, 0.8) - prox_l2_block(v, 0.8)).norm() <= (u - v).norm() + 1e-10);
    const CVector cu = testutil::random_complex(rng, 6, 1), cv = testutil::random_complex(rng, 6, 1);
    CHECK((prox_l2_block(cu, 0.8) - prox_l2_block(cv, 0.8)).norm() <= (cu - cv).norm() + 1e-10);
  }
}

}  // TEST_SUITE
