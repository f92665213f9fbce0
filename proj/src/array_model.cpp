// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/array_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrsdoa {

ArrayGeometry::ArrayGeometry(std::vector<double> positions) : positions_(std::move(positions)) {
  if (positions_.size() < 2) {
    throw std::invalid_argument("ArrayGeometry: at least two sensors are required");
  }
  for (size_t k = 1; k < positions_.size(); ++k) {
    if (!(positions_[k] > positions_[k - 1])) {
      throw std::invalid_argument("ArrayGeometry: positions must be strictly increasing");
    }
  }
}

ArrayGeometry ArrayGeometry::uniform_linear(Index sensors) {
  if (sensors < 2) throw std::invalid_argument("ArrayGeometry: at least two sensors are required");
  std::vector<double> pos(static_cast<size_t>(sensors));
  for (Index k = 0; k < sensors; ++k) pos[static_cast<size_t>(k)] = static_cast<double>(k);
  return ArrayGeometry(std::move(pos));
}

AngularGrid::AngularGrid(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
  if (angles_.empty()) throw std::invalid_argument("AngularGrid: grid is empty");
  for (size_t k = 0; k < angles_.size(); ++k) {
    if (!(angles_[k] >= 0.0 && angles_[k] < 180.0)) {
      throw std::invalid_argument("AngularGrid: angles must lie in [0, 180)");
    }
    if (k > 0 && !(angles_[k] > angles_[k - 1])) {
      throw std::invalid_argument("AngularGrid: angles must be strictly increasing");
    }
  }
}

AngularGrid AngularGrid::uniform(Index points) {
  if (points < 1) throw std::invalid_argument("AngularGrid: need at least one point");
  std::vector<double> a(static_cast<size_t>(points));
  for (Index k = 0; k < points; ++k) {
    a[static_cast<size_t>(k)] = 180.0 * static_cast<double>(k) / static_cast<double>(points);
  }
  return AngularGrid(std::move(a));
}

AngularGrid AngularGrid::spanning(double lo_deg, double hi_deg, double step_deg) {
  if (!(step_deg > 0.0) || !(hi_deg >= lo_deg)) {
    throw std::invalid_argument("AngularGrid::spanning: need step > 0 and hi >= lo");
  }
  std::vector<double> a;
  const auto count = static_cast<long>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9));
  for (long k = 0; k <= count; ++k) {
    // Snap to the step lattice so 84.75 - 3 + k * 0.5 does not drift.
    const double v = std::round((lo_deg + static_cast<double>(k) * step_deg) * 1e9) / 1e9;
    if (v >= 0.0 && v < 180.0) a.push_back(v);
  }
  return AngularGrid(std::move(a));
}

CVector steering_vector(const ArrayGeometry& geom, double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg < 180.0)) {
    std::ostringstream msg;
    msg << "steering_vector: theta " << theta_deg << " outside [0, 180)";
    throw std::domain_error(msg.str());
  }
  // cos(90 deg) is not exactly zero in floating point; broadside is forced.
  const double c = theta_deg == 90.0 ? 0.0 : std::cos(theta_deg * kDegToRad);
  const auto& pos = geom.positions();
  CVector a(geom.sensor_count());
  for (Index k = 0; k < a.size(); ++k) {
    const double phase = kPi * pos[static_cast<size_t>(k)] * c;
    a(k) = phase == 0.0 ? Complex(1.0, 0.0) : std::polar(1.0, phase);
  }
  return a;
}

CMatrix steering_matrix(const ArrayGeometry& geom, const std::vector<double>& thetas_deg) {
  CMatrix a(geom.sensor_count(), static_cast<Index>(thetas_deg.size()));
  for (size_t k = 0; k < thetas_deg.size(); ++k) {
    a.col(static_cast<Index>(k)) = steering_vector(geom, thetas_deg[k]);
  }
  return a;
}

CMatrix manifold_matrix(const ArrayGeometry& geom, const AngularGrid& grid) {
  return steering_matrix(geom, grid.angles());
}

CMatrix khatri_rao_manifold(const CMatrix& a_tilde) {
  const Index m = a_tilde.rows();
  CMatrix kr(m * m, a_tilde.cols());
  for (Index k = 0; k < a_tilde.cols(); ++k) {
    for (Index c = 0; c < m; ++c) {
      const Complex outer = std::conj(a_tilde(c, k));
      for (Index r = 0; r < m; ++r) kr(c * m + r, k) = outer * a_tilde(r, k);
    }
  }
  return kr;
}

CVector vectorize(const CMatrix& x) {
  return Eigen::Map<const CVector>(x.data(), x.size());
}

}  // namespace lrsdoa
