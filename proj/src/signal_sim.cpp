// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/signal_sim.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lrsdoa {

NoiseModel::NoiseModel(HermitianMatrix covariance, SupportSet support)
    : covariance_(std::move(covariance)), support_(std::move(support)) {
  const Index m = covariance_.dimension();
  if (support_.dimension() != m) {
    throw std::invalid_argument("NoiseModel: support and covariance dimensions differ");
  }
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (!support_.contains(i, j) && covariance_(i, j) != Complex(0.0, 0.0)) {
        std::ostringstream msg;
        msg << "NoiseModel: entry (" << i << ", " << j << ") is nonzero but outside the support";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  if (!covariance_.is_psd()) {
    std::ostringstream msg;
    msg << "NoiseModel: covariance is not PSD, minimum eigenvalue " << covariance_.eigenvalues()(0);
    throw std::invalid_argument(msg.str());
  }
}

double NoiseModel::mean_noise_power() const {
  return covariance_.matrix().diagonal().real().mean();
}

void SourceScenario::validate(Index sensors) const {
  const Index q = source_count();
  if (q < 1) throw std::invalid_argument("SourceScenario: no sources");
  if (q >= sensors) throw std::invalid_argument("SourceScenario: need fewer sources than sensors");
  if (source_cov.dimension() != q) {
    throw std::invalid_argument("SourceScenario: source_cov dimension does not match source count");
  }
  for (double t : thetas_deg) {
    if (!(t >= 0.0 && t < 180.0)) throw std::invalid_argument("SourceScenario: angle outside [0, 180)");
  }
  if (!source_cov.is_psd()) throw std::invalid_argument("SourceScenario: source_cov is not PSD");
}

SourceScenario SourceScenario::uncorrelated(std::vector<double> thetas_deg, double snr_db) {
  const auto q = static_cast<Index>(thetas_deg.size());
  return SourceScenario{std::move(thetas_deg), HermitianMatrix::identity(q), snr_db, false};
}

SourceScenario SourceScenario::correlated_pair(double theta1_deg, double theta2_deg, double rho,
                                               double snr_db) {
  if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("correlated_pair: |rho| must be <= 1");
  CMatrix c(2, 2);
  c << 1.0, rho, rho, 1.0;
  return SourceScenario{{theta1_deg, theta2_deg}, HermitianMatrix(c), snr_db, false};
}

HermitianMatrix effective_source_covariance(const SourceScenario& scenario,
                                            const NoiseModel& noise) {
  if (scenario.noise_only) return HermitianMatrix::zero(scenario.source_count());
  const double power = std::pow(10.0, scenario.snr_db / 10.0) * noise.mean_noise_power();
  return HermitianMatrix(power * scenario.source_cov.matrix());
}

HermitianMatrix exact_covariance(const SourceScenario& scenario, const NoiseModel& noise,
                                 const ArrayGeometry& geom) {
  scenario.validate(geom.sensor_count());
  const CMatrix a = steering_matrix(geom, scenario.thetas_deg);
  const HermitianMatrix rs = effective_source_covariance(scenario, noise);
  return HermitianMatrix(a * rs.matrix() * a.adjoint() + noise.covariance().matrix());
}

NoiseModel tridiagonal_noise_covariance(Index sensors, double diag_var, Complex offdiag) {
  if (sensors < 2) throw std::invalid_argument("tridiagonal_noise_covariance: need m >= 2");
  CMatrix rw = CMatrix::Zero(sensors, sensors);
  for (Index i = 0; i < sensors; ++i) {
    rw(i, i) = diag_var;
    if (i + 1 < sensors) {
      rw(i, i + 1) = offdiag;
      rw(i + 1, i) = std::conj(offdiag);
    }
  }
  HermitianMatrix h(rw);
  const RVector ev = h.eigenvalues();
  if (ev(0) < -1e-12 * ev.cwiseAbs().maxCoeff()) {
    std::ostringstream msg;
    msg << "tridiagonal_noise_covariance: parameters give a non-PSD matrix, minimum eigenvalue "
        << ev(0);
    throw std::invalid_argument(msg.str());
  }
  return NoiseModel(std::move(h), band_support(sensors, 1));
}

SupportSet band_support(Index sensors, Index bandwidth) {
  if (bandwidth < 0 || bandwidth >= sensors) {
    throw std::invalid_argument("band_support: need 0 <= bandwidth < m");
  }
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(sensors, sensors);
  for (Index j = 0; j < sensors; ++j) {
    for (Index i = 0; i < sensors; ++i) mask(i, j) = std::abs(i - j) <= bandwidth;
  }
  return SupportSet::from_mask(mask);
}

SupportSet block_support(const std::vector<Index>& block_sizes) {
  if (block_sizes.empty()) throw std::invalid_argument("block_support: no blocks");
  Index m = 0;
  for (Index b : block_sizes) {
    if (b < 1) throw std::invalid_argument("block_support: block sizes must be positive");
    m += b;
  }
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, m, false);
  Index start = 0;
  for (Index b : block_sizes) {
    mask.block(start, start, b, b).setConstant(true);
    start += b;
  }
  return SupportSet::from_mask(mask);
}

CMatrix hermitian_sqrt(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_sqrt: eigendecomposition failed");
  const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// Standard circularly-symmetric complex normal entries, E|z|^2 = 1.
CMatrix complex_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix z(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const double re = nd(rng);
      const double im = nd(rng);
      z(r, c) = Complex(re, im);
    }
  }
  return z;
}

}  // namespace

CMatrix simulate_snapshots(const SourceScenario& scenario, const NoiseModel& noise,
                           const ArrayGeometry& geom, Index snapshots, std::uint64_t seed) {
  const Index m = geom.sensor_count();
  if (snapshots < 1) throw std::invalid_argument("simulate_snapshots: need N >= 1");
  if (noise.dimension() != m) {
    throw std::invalid_argument("simulate_snapshots: noise dimension does not match the array");
  }
  scenario.validate(m);

  std::mt19937_64 rng(seed);
  // Source draws come first so the noise stream is identical for a given
  // seed regardless of SNR.
  const CMatrix xi_s = complex_normal(scenario.source_count(), snapshots, rng);
  const CMatrix xi_w = complex_normal(m, snapshots, rng);

  CMatrix x = hermitian_sqrt(noise.covariance()) * xi_w;
  if (!scenario.noise_only) {
    const CMatrix a = steering_matrix(geom, scenario.thetas_deg);
    const CMatrix rs_half = hermitian_sqrt(effective_source_covariance(scenario, noise));
    x.noalias() += a * (rs_half * xi_s);
  }
  return x;
}

HermitianMatrix sample_covariance(const CMatrix& snapshots) {
  if (snapshots.cols() < 1) throw std::invalid_argument("sample_covariance: need N >= 1");
  CMatrix r = CMatrix::Zero(snapshots.rows(), snapshots.rows());
  r.selfadjointView<Eigen::Lower>().rankUpdate(snapshots, 1.0 / static_cast<double>(snapshots.cols()));
  return HermitianMatrix(CMatrix(r.selfadjointView<Eigen::Lower>()));
}

}  // namespace lrsdoa
