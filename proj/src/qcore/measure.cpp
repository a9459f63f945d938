#include "coqkd/qcore/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace coqkd::qcore {

namespace {

void check_orthonormal(const MeasurementBasis& b) {
  const Eigen::Index d = Eigen::Index{1} << b.qubits;
  if (b.kets.size() != static_cast<std::size_t>(d) ||
      b.labels.size() != b.kets.size()) {
    throw std::invalid_argument("basis must span the target space");
  }
  for (std::size_t i = 0; i < b.kets.size(); ++i) {
    if (b.kets[i].size() != d) {
      throw std::invalid_argument("basis ket has wrong dimension");
    }
    for (std::size_t j = 0; j <= i; ++j) {
      const cx ip = b.kets[j].dot(b.kets[i]);
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - expect) > kTolExact) {
        throw std::invalid_argument("basis kets are not orthonormal");
      }
    }
  }
}

}  // namespace

MeasurementBasis computational_basis(int qubits) {
  if (qubits < 1) throw std::invalid_argument("qubits must be >= 1");
  const Eigen::Index d = Eigen::Index{1} << qubits;
  MeasurementBasis b;
  b.qubits = qubits;
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXcd k = Eigen::VectorXcd::Zero(d);
    k(i) = 1.0;
    b.kets.push_back(std::move(k));
    std::string label(qubits, '0');
    for (int q = 0; q < qubits; ++q) {
      if ((i >> (qubits - 1 - q)) & 1) label[q] = '1';
    }
    b.labels.push_back(std::move(label));
  }
  return b;
}

MeasurementBasis QubitBasis::basis() const {
  const double norm = std::sqrt(1.0 + std::norm(n));
  MeasurementBasis b;
  b.qubits = 1;
  Eigen::VectorXcd plus(2), minus(2);
  plus << 1.0 / norm, n / norm;
  minus << -std::conj(n) / norm, 1.0 / norm;
  b.kets = {plus, minus};
  b.labels = {"+", "-"};
  check_orthonormal(b);
  return b;
}

MeasurementBasis JointBasis::basis() const {
  const double norm = std::sqrt(1.0 + std::norm(m));
  MeasurementBasis b;
  b.qubits = 2;
  Eigen::VectorXcd chip = Eigen::VectorXcd::Zero(4);
  Eigen::VectorXcd chim = Eigen::VectorXcd::Zero(4);
  Eigen::VectorXcd zetap = Eigen::VectorXcd::Zero(4);
  Eigen::VectorXcd zetam = Eigen::VectorXcd::Zero(4);
  chip(0) = 1.0 / norm;
  chip(3) = m / norm;
  chim(0) = std::conj(m) / norm;
  chim(3) = -1.0 / norm;
  zetap(1) = 1.0 / norm;
  zetap(2) = m / norm;
  zetam(1) = std::conj(m) / norm;
  zetam(2) = -1.0 / norm;
  b.kets = {chip, chim, zetap, zetam};
  b.labels = {"chi+", "chi-", "zeta+", "zeta-"};
  check_orthonormal(b);
  return b;
}

std::vector<MeasurementBranch> measure(const StateVector& s,
                                       const MeasurementBasis& basis,
                                       const std::vector<char>& targets) {
  check_orthonormal(basis);
  if (static_cast<int>(targets.size()) != basis.qubits) {
    throw std::invalid_argument("basis dimension does not match target count");
  }
  const int n = s.num_qubits();
  const int k = basis.qubits;
  const int r = n - k;
  std::vector<int> tshift(k);
  std::vector<bool> is_target(n, false);
  for (int t = 0; t < k; ++t) {
    const int pos = s.position(targets[t]);
    if (is_target[pos]) {
      throw std::invalid_argument("duplicate measurement target");
    }
    is_target[pos] = true;
    tshift[t] = n - 1 - pos;
  }
  std::vector<int> rshift;
  std::vector<char> rest_order;
  for (int i = 0; i < n; ++i) {
    if (!is_target[i]) {
      rshift.push_back(n - 1 - i);
      rest_order.push_back(s.qubit_order()[i]);
    }
  }
  const Eigen::Index dk = Eigen::Index{1} << k;
  const Eigen::Index dr = Eigen::Index{1} << r;

  // Gather amplitudes into (target index, rest index) layout.
  Eigen::MatrixXcd g(dk, dr);
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    Eigen::Index ti = 0, ri = 0;
    for (int t = 0; t < k; ++t) ti = (ti << 1) | ((i >> tshift[t]) & 1);
    for (int t = 0; t < r; ++t) ri = (ri << 1) | ((i >> rshift[t]) & 1);
    g(ti, ri) = s.amp(i);
  }

  std::vector<MeasurementBranch> branches;
  branches.reserve(basis.kets.size());
  double total = 0.0;
  for (std::size_t b = 0; b < basis.kets.size(); ++b) {
    Eigen::VectorXcd proj = (basis.kets[b].adjoint() * g).transpose();
    const double prob = proj.squaredNorm();
    total += prob;
    MeasurementBranch branch;
    branch.outcome = basis.labels[b];
    branch.probability = prob;
    if (prob < kBranchCutoff) {
      branch.empty_branch = true;
    } else if (r == 0) {
      // Full measurement leaves no residual system; state stays empty.
    } else {
      branch.state = StateVector::normalized(std::move(proj), rest_order);
    }
    branches.push_back(std::move(branch));
  }
  if (std::abs(total - 1.0) > kTolExact) {
    throw std::logic_error("branch probabilities do not sum to one");
  }
  return branches;
}

}  // namespace coqkd::qcore
