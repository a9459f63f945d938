#include "coqkd/qcore/observable.hpp"

#include <cmath>
#include <stdexcept>

namespace coqkd::qcore {

Observable::Observable(Eigen::Matrix2cd m, std::string l)
    : matrix(std::move(m)), label(std::move(l)) {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kTolExact) {
    throw std::invalid_argument("observable must be Hermitian: " + label);
  }
}

Observable sigma_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return Observable(m, "X");
}

Observable sigma_y() {
  Eigen::Matrix2cd m;
  m << cx{0, 0}, cx{0, -1}, cx{0, 1}, cx{0, 0};
  return Observable(m, "Y");
}

Observable sigma_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return Observable(m, "Z");
}

Observable identity_obs() {
  return Observable(Eigen::Matrix2cd::Identity(), "I");
}

Observable pauli_combo(double x, double y, double z) {
  Eigen::Matrix2cd m;
  m << cx{z, 0}, cx{x, -y}, cx{x, y}, cx{-z, 0};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3gX%+.3gY%+.3gZ", x, y, z);
  return Observable(m, buf);
}

std::pair<Eigen::Vector2cd, Eigen::Vector2cd> dichotomic_eigenvectors(
    const Observable& o) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(o.matrix);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed for " + o.label);
  }
  // Eigen sorts eigenvalues ascending: column 1 belongs to the + outcome.
  return {es.eigenvectors().col(1), es.eigenvectors().col(0)};
}

double expectation(
    const StateVector& s,
    const std::vector<std::pair<char, Observable>>& per_party) {
  Eigen::VectorXcd v = s.amplitudes();
  for (const auto& [label, obs] : per_party) {
    v = detail::apply_one_raw(v, s.num_qubits(), s.position(label),
                              obs.matrix);
  }
  const cx value = s.amplitudes().dot(v);
  if (std::abs(value.imag()) > 1e-9) {
    throw std::logic_error("expectation value is not real");
  }
  return value.real();
}

double chsh_value(const StateVector& s, const Observable& a1,
                  const Observable& a2, const Observable& b1,
                  const Observable& b2) {
  if (s.num_qubits() != 2) {
    throw std::invalid_argument("chsh_value requires a two-qubit state");
  }
  const char la = s.qubit_order()[0];
  const char lb = s.qubit_order()[1];
  auto corr = [&](const Observable& a, const Observable& b) {
    return expectation(s, {{la, a}, {lb, b}});
  };
  return corr(a1, b1) + corr(a1, b2) + corr(a2, b1) - corr(a2, b2);
}

}  // namespace coqkd::qcore
