// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/admm.hpp"
#include "lrsdoa/proximal.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>

using namespace lrsdoa;

TEST_SUITE("admm") {

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SolverConfig{};
  c.tol_primal = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SolverConfig{};
  c.admm_penalty = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SolverConfig{};
  c.relaxation = 2.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("Woodbury solve matches a dense solve") {
  std::mt19937_64 rng(1);
  const Index n = 30, k = 6;
  RMatrix b(k, n);
  for (Index j = 0; j < n; ++j) b.col(j) = testutil::random_real(rng, k);
  RVector w(k);
  for (Index i = 0; i < k; ++i) w(i) = 1.0 + static_cast<double>(i % 2);
  const RVector r = testutil::random_real(rng, n);
  const RMatrix dense = 2.0 * RMatrix::Identity(n, n) + b.transpose() * w.asDiagonal() * b;
  const RVector expect = dense.llt().solve(r);

  const WoodburySolver ws(2.0, b, w);
  CHECK((ws.solve(r) - expect).norm() <= 1e-12 * expect.norm());
  const WoodburySolver op(
      2.0, [&b](const RVector& v) -> RVector { return b * v; },
      [&b](const RVector& v) -> RVector { return b.transpose() * v; }, k, w);
  CHECK((op.solve(r) - expect).norm() <= 1e-12 * expect.norm());
  CHECK_THROWS_AS(WoodburySolver(0.0, b), std::invalid_argument);
  CHECK_THROWS_AS(WoodburySolver(1.0, b, RVector::Ones(k + 1)), std::invalid_argument);
}

TEST_CASE("nonnegative least-norm problem reaches its closed-form solution") {
  // minimize sum(x) + 5 ||x - b||_2 over x >= 0 with b >= 0: since
  // ||1||_2 = 2 < 5, the fit term is exact at the optimum and x = b.
  RVector b(4);
  b << 1.0, 0.0, 0.5, 3.0;
  AdmmProblem p;
  p.dimension = 4;
  p.blocks.push_back({"l1", 4, {}, {}, [](const RVector& v, double t) { return prox_l1_nonneg(v, t); }});
  p.blocks.push_back({"fit", 4, {}, {}, [b](const RVector& v, double t) -> RVector {
                        return b + prox_l2_block(RVector(v - b), 5.0 * t);
                      }});
  p.normal_solve = [](const RVector& r) -> RVector { return r / 2.0; };
  SolverConfig cfg;
  cfg.tol_primal = cfg.tol_dual = 1e-10;
  cfg.tol_relative = 1e-10;
  cfg.max_iter = 20000;
  const AdmmResult res = run_admm(p, cfg);
  CHECK(res.report.converged);
  CHECK(res.report.primal_residual <= res.report.primal_tolerance);
  CHECK(res.report.dual_residual <= res.report.dual_tolerance);
  const RVector expect = b;
  CHECK((res.z[0] - expect).norm() < 1e-7);
}

TEST_CASE("linear cost and iteration limit reporting") {
  // minimize c^T x + indicator(x in [0, 1]^n): x = 1 where c < 0.
  RVector c(3);
  c << -1.0, 2.0, -0.5;
  AdmmProblem p;
  p.dimension = 3;
  p.linear_cost = c;
  p.blocks.push_back({"box", 3, {}, {}, [](const RVector& v, double) -> RVector {
                        return v.cwiseMax(0.0).cwiseMin(1.0);
                      }});
  p.normal_solve = [](const RVector& r) { return r; };
  SolverConfig cfg;
  cfg.tol_primal = cfg.tol_dual = 1e-9;
  cfg.max_iter = 5000;
  const AdmmResult res = run_admm(p, cfg);
  CHECK(res.report.converged);
  CHECK(res.z[0](0) == doctest::Approx(1.0));
  CHECK(res.z[0](1) == doctest::Approx(0.0));
  CHECK(res.z[0](2) == doctest::Approx(1.0));

  cfg.max_iter = 2;
  const AdmmResult short_run = run_admm(p, cfg);
  CHECK_FALSE(short_run.report.converged);
  CHECK(short_run.report.iterations == 2);
}

TEST_CASE("incomplete problems are rejected") {
  AdmmProblem p;
  p.dimension = 2;
  CHECK_THROWS_AS(run_admm(p, SolverConfig{}), std::invalid_argument);
}

}  // TEST_SUITE
