#include "coqkd/qcore/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coqkd::qcore {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

void check_order(const Eigen::VectorXcd& amps,
                 const std::vector<char>& order) {
  if (!is_power_of_two(amps.size())) {
    throw std::invalid_argument("amplitude length must be a power of two");
  }
  if (amps.size() != (Eigen::Index{1} << order.size())) {
    throw std::invalid_argument("qubit_order length does not match dimension");
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (order[i] == order[j]) {
        throw std::invalid_argument("duplicate party label in qubit_order");
      }
    }
  }
}

}  // namespace

namespace detail {

Eigen::VectorXcd apply_one_raw(const Eigen::VectorXcd& amps, int n_qubits,
                               int pos, const Eigen::Matrix2cd& op) {
  const Eigen::Index stride = Eigen::Index{1} << (n_qubits - 1 - pos);
  Eigen::VectorXcd out(amps.size());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    const Eigen::Index bit = (i / stride) & 1;
    const Eigen::Index partner = bit ? i - stride : i + stride;
    out(i) = op(bit, bit) * amps(i) + op(bit, 1 - bit) * amps(partner);
  }
  return out;
}

}  // namespace detail

StateVector::StateVector(Eigen::VectorXcd amplitudes,
                         std::vector<char> qubit_order)
    : amps_(std::move(amplitudes)), order_(std::move(qubit_order)) {
  check_order(amps_, order_);
  if (std::abs(amps_.squaredNorm() - 1.0) > kTolExact) {
    throw std::invalid_argument("state vector is not normalized");
  }
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes,
                                    std::vector<char> qubit_order) {
  check_order(amplitudes, qubit_order);
  const double norm = amplitudes.norm();
  if (norm < kBranchCutoff) {
    throw std::invalid_argument("cannot normalize a zero vector");
  }
  return StateVector(amplitudes / norm, std::move(qubit_order));
}

int StateVector::position(char label) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == label) return static_cast<int>(i);
  }
  throw std::invalid_argument(std::string("unknown party label: ") + label);
}

bool StateVector::has_label(char label) const {
  return std::find(order_.begin(), order_.end(), label) != order_.end();
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  for (char l : b.qubit_order()) {
    if (a.has_label(l)) {
      throw std::invalid_argument(std::string("overlapping party label: ") + l);
    }
  }
  const Eigen::Index da = a.dim(), db = b.dim();
  Eigen::VectorXcd out(da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    out.segment(i * db, db) = a.amp(i) * b.amplitudes();
  }
  std::vector<char> order = a.qubit_order();
  order.insert(order.end(), b.qubit_order().begin(), b.qubit_order().end());
  return StateVector(std::move(out), std::move(order));
}

cx inner(const StateVector& a, const StateVector& b) {
  if (a.qubit_order() != b.qubit_order()) {
    throw std::invalid_argument("inner product requires identical qubit order");
  }
  return a.amplitudes().dot(b.amplitudes());
}

StateVector apply_one(const StateVector& s, char label,
                      const Eigen::Matrix2cd& op) {
  Eigen::VectorXcd out = detail::apply_one_raw(s.amplitudes(), s.num_qubits(),
                                               s.position(label), op);
  return StateVector(std::move(out), s.qubit_order());
}

StateVector apply_many(const StateVector& s, const std::vector<char>& labels,
                       const Eigen::MatrixXcd& op) {
  const int k = static_cast<int>(labels.size());
  const Eigen::Index dk = Eigen::Index{1} << k;
  if (op.rows() != dk || op.cols() != dk) {
    throw std::invalid_argument("operator dimension does not match label count");
  }
  const int n = s.num_qubits();
  std::vector<int> shift(k);
  for (int t = 0; t < k; ++t) {
    shift[t] = n - 1 - s.position(labels[t]);
  }
  const Eigen::Index dim = s.dim();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index tin = 0;
    for (int t = 0; t < k; ++t) {
      tin = (tin << 1) | ((i >> shift[t]) & 1);
    }
    for (Eigen::Index tout = 0; tout < dk; ++tout) {
      const cx w = op(tout, tin);
      if (w == cx{0.0, 0.0}) continue;
      Eigen::Index j = i;
      for (int t = 0; t < k; ++t) {
        const Eigen::Index bit = (tout >> (k - 1 - t)) & 1;
        j = (j & ~(Eigen::Index{1} << shift[t])) | (bit << shift[t]);
      }
      out(j) += w * s.amp(i);
    }
  }
  return StateVector(std::move(out), s.qubit_order());
}

bool approx_equal(const StateVector& a, const StateVector& b, double tol) {
  if (a.qubit_order() != b.qubit_order() || a.dim() != b.dim()) return false;
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() <= tol;
}

bool approx_equal_up_to_phase(const StateVector& a, const StateVector& b,
                              double tol) {
  if (a.qubit_order() != b.qubit_order() || a.dim() != b.dim()) return false;
  Eigen::Index ref;
  a.amplitudes().cwiseAbs().maxCoeff(&ref);
  if (std::abs(b.amp(ref)) < kBranchCutoff) return false;
  const cx phase = a.amp(ref) / b.amp(ref);
  if (std::abs(std::abs(phase) - 1.0) > 1e-9) return false;
  return (a.amplitudes() - phase * b.amplitudes()).cwiseAbs().maxCoeff() <= tol;
}

StateVector computational_ket(const std::string& bits,
                              const std::vector<char>& order) {
  if (bits.size() != order.size()) {
    throw std::invalid_argument("bit string length does not match order");
  }
  Eigen::Index idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bit string must contain only 0 and 1");
    }
    idx = (idx << 1) | (c == '1' ? 1 : 0);
  }
  Eigen::VectorXcd amps =
      Eigen::VectorXcd::Zero(Eigen::Index{1} << bits.size());
  amps(idx) = 1.0;
  return StateVector(std::move(amps), order);
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries,
                             std::vector<char> qubit_order)
    : entries_(std::move(entries)), order_(std::move(qubit_order)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("density matrix must be square");
  }
  if (entries_.rows() != (Eigen::Index{1} << order_.size())) {
    throw std::invalid_argument("density dimension does not match qubit_order");
  }
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kTolExact) {
    throw std::invalid_argument("density matrix must be Hermitian");
  }
  if (std::abs(entries_.trace().real() - 1.0) > kTolExact ||
      std::abs(entries_.trace().imag()) > kTolExact) {
    throw std::invalid_argument("density matrix must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries_,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kTolExact) {
    throw std::domain_error("density matrix is not positive semidefinite");
  }
}

int DensityMatrix::position(char label) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == label) return static_cast<int>(i);
  }
  throw std::invalid_argument(std::string("unknown party label: ") + label);
}

DensityMatrix density(const StateVector& s) {
  return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint(),
                       s.qubit_order());
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<char>& keep) {
  if (keep.empty()) {
    throw std::invalid_argument("keep set must be nonempty");
  }
  const int n = rho.num_qubits();
  std::vector<bool> kept(n, false);
  for (char l : keep) {
    kept[rho.position(l)] = true;
  }
  std::vector<int> keep_pos, trace_pos;
  std::vector<char> keep_order;
  for (int i = 0; i < n; ++i) {
    if (kept[i]) {
      keep_pos.push_back(i);
      keep_order.push_back(rho.qubit_order()[i]);
    } else {
      trace_pos.push_back(i);
    }
  }
  const int k = static_cast<int>(keep_pos.size());
  const int t = n - k;
  const Eigen::Index dk = Eigen::Index{1} << k;
  const Eigen::Index dt = Eigen::Index{1} << t;

  auto compose = [&](Eigen::Index ki, Eigen::Index ti) {
    Eigen::Index full = 0;
    for (int b = 0; b < k; ++b) {
      full |= ((ki >> (k - 1 - b)) & 1) << (n - 1 - keep_pos[b]);
    }
    for (int b = 0; b < t; ++b) {
      full |= ((ti >> (t - 1 - b)) & 1) << (n - 1 - trace_pos[b]);
    }
    return full;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      cx sum{0.0, 0.0};
      for (Eigen::Index ti = 0; ti < dt; ++ti) {
        sum += rho.entries()(compose(i, ti), compose(j, ti));
      }
      out(i, j) = sum;
    }
  }
  return DensityMatrix(std::move(out), std::move(keep_order));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.entries(),
                                                     Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda < -kTolExact) {
      throw std::domain_error("negative eigenvalue beyond tolerance");
    }
    if (lambda <= kTolExact) continue;
    s -= lambda * std::log2(lambda);
  }
  return s;
}

std::vector<double> marginal_entropies(const StateVector& s) {
  const DensityMatrix rho = density(s);
  std::vector<double> out;
  out.reserve(s.qubit_order().size());
  for (char l : s.qubit_order()) {
    out.push_back(von_neumann_entropy(partial_trace(rho, {l})));
  }
  return out;
}

}  // namespace coqkd::qcore
