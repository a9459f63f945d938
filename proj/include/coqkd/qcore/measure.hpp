#pragma once

#include <string>
#include <vector>

#include "coqkd/qcore/state.hpp"

namespace coqkd::qcore {

/// A complete orthonormal measurement basis on `qubits` qubits.
struct MeasurementBasis {
  int qubits = 0;
  std::vector<Eigen::VectorXcd> kets;
  std::vector<std::string> labels;
};

MeasurementBasis computational_basis(int qubits);

/// One-parameter single-qubit basis:
///   |+_n> = (|0> + n|1>)/sqrt(1+|n|^2),  |-_n> = (-conj(n)|0> + |1>)/sqrt(1+|n|^2)
struct QubitBasis {
  cx n;
  MeasurementBasis basis() const;
};

/// One-parameter entangled two-qubit basis (generalized Bell basis):
///   |chi+>  = (|00> + m|11>)/s,  |chi->  = (conj(m)|00> - |11>)/s,
///   |zeta+> = (|01> + m|10>)/s,  |zeta-> = (conj(m)|01> - |10>)/s,
/// with s = sqrt(1+|m|^2). At m=1 this is the standard Bell basis.
struct JointBasis {
  cx m;
  MeasurementBasis basis() const;
};

struct MeasurementBranch {
  std::string outcome;
  double probability = 0.0;
  StateVector state;  // remaining qubits; empty when the branch has ~zero weight
  bool empty_branch = false;
};

/// Projective measurement of the target parties. Returns one branch per basis
/// ket; probabilities sum to one. Branches below the probability cutoff are
/// kept in the list with the empty flag set so downstream bookkeeping is total.
std::vector<MeasurementBranch> measure(const StateVector& s,
                                       const MeasurementBasis& basis,
                                       const std::vector<char>& targets);

}  // namespace coqkd::qcore
