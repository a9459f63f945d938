#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace coqkd::qcore {

using cx = std::complex<double>;

// Tolerance ladder used across the library: exact algebra, optimization-based
// checks, and the threshold below which a marginal counts as maximally mixed.
inline constexpr double kTolExact = 1e-12;
inline constexpr double kTolOpt = 1e-9;
inline constexpr double kMaximalMixMargin = 1e-9;
inline constexpr double kBranchCutoff = 1e-14;

/// Pure n-qubit state. qubit_order lists party labels; the leftmost label
/// owns the most significant bit of the amplitude index.
class StateVector {
public:
  StateVector() = default;
  StateVector(Eigen::VectorXcd amplitudes, std::vector<char> qubit_order);

  /// Builds a state from an unnormalized amplitude vector.
  static StateVector normalized(Eigen::VectorXcd amplitudes,
                                std::vector<char> qubit_order);

  bool empty() const { return amps_.size() == 0; }
  int num_qubits() const { return static_cast<int>(order_.size()); }
  Eigen::Index dim() const { return amps_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  const std::vector<char>& qubit_order() const { return order_; }

  /// Position of a party label in the order (0 = most significant bit).
  int position(char label) const;
  bool has_label(char label) const;
  cx amp(Eigen::Index i) const { return amps_(i); }

private:
  Eigen::VectorXcd amps_;
  std::vector<char> order_;
};

/// Kronecker composition; party label sets must be disjoint.
StateVector tensor(const StateVector& a, const StateVector& b);

/// <a|b>; both states must share the same qubit_order.
cx inner(const StateVector& a, const StateVector& b);

/// Applies a single-qubit operator to the qubit of the given party.
StateVector apply_one(const StateVector& s, char label,
                      const Eigen::Matrix2cd& op);

/// Applies a k-qubit operator to the listed parties. The first listed label
/// owns the most significant bit of the operator's index space.
StateVector apply_many(const StateVector& s, const std::vector<char>& labels,
                       const Eigen::MatrixXcd& op);

bool approx_equal(const StateVector& a, const StateVector& b,
                  double tol = kTolExact);
bool approx_equal_up_to_phase(const StateVector& a, const StateVector& b,
                              double tol = kTolExact);

/// |bits> in the computational basis, e.g. computational_ket("01", {'A','B'}).
StateVector computational_ket(const std::string& bits,
                              const std::vector<char>& order);

/// Hermitian, positive semidefinite, unit-trace operator on labeled qubits.
class DensityMatrix {
public:
  DensityMatrix() = default;
  DensityMatrix(Eigen::MatrixXcd entries, std::vector<char> qubit_order);

  int num_qubits() const { return static_cast<int>(order_.size()); }
  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  const std::vector<char>& qubit_order() const { return order_; }
  int position(char label) const;

private:
  Eigen::MatrixXcd entries_;
  std::vector<char> order_;
};

DensityMatrix density(const StateVector& s);

/// Traces out every party not in `keep`; kept parties retain their relative
/// order. `keep` must be a nonempty subset of the labels.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<char>& keep);

/// -sum(lambda log2 lambda) in bits, with 0 log 0 = 0. Eigenvalues in
/// [-1e-12, 0) are clamped to zero; anything lower is an error.
double von_neumann_entropy(const DensityMatrix& rho);

/// Entropy of each single-qubit marginal, in qubit_order.
std::vector<double> marginal_entropies(const StateVector& s);

namespace detail {
/// Raw single-qubit operator application; does not renormalize, so it also
/// serves non-norm-preserving operators (projectors, observables).
Eigen::VectorXcd apply_one_raw(const Eigen::VectorXcd& amps, int n_qubits,
                               int pos, const Eigen::Matrix2cd& op);
}  // namespace detail

}  // namespace coqkd::qcore
