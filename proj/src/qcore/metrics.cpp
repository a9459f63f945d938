#include "coqkd/qcore/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "coqkd/qcore/observable.hpp"

namespace coqkd::qcore {

double concurrence(const StateVector& s) {
  if (s.num_qubits() != 2) {
    throw std::invalid_argument("concurrence requires a two-qubit state");
  }
  const Eigen::Vector4cd c = s.amplitudes().conjugate();
  Eigen::Vector4cd yy;
  yy << -c(3), c(2), c(1), -c(0);
  const cx v = s.amplitudes().dot(yy);
  return std::abs(v);
}

Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho) {
  if (rho.num_qubits() != 2) {
    throw std::invalid_argument("correlation matrix requires two qubits");
  }
  const Eigen::Matrix2cd paulis[3] = {sigma_x().matrix, sigma_y().matrix,
                                      sigma_z().matrix};
  Eigen::Matrix3d t;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      Eigen::Matrix4cd op;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          op.block<2, 2>(2 * i, 2 * j) = paulis[a](i, j) * paulis[b];
        }
      }
      t(a, b) = (rho.entries() * op).trace().real();
    }
  }
  return t;
}

double teleport_fidelity_bound(const DensityMatrix& rho) {
  const Eigen::Matrix3d t = correlation_matrix(rho);
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
  const double trace_root = svd.singularValues().sum();
  return 0.5 * (1.0 + trace_root / 3.0);
}

}  // namespace coqkd::qcore
