#pragma once

#include <array>
#include <string>
#include <vector>

#include "coqkd/qcore/state.hpp"

namespace coqkd::states {

enum class Family {
  Ghz3,
  Nmm,
  PhiU,
  Ghz4,
  Cluster4,
  R1,
  FourGeneral,
  Tmes,
};

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// The four standard Bell states on two labeled qubits.
qcore::StateVector bell(BellKind kind, char q1, char q2);

/// Resource description. Three-qubit families carry labels (C, A, B) with the
/// controller first; four-qubit families carry (D, C, A, B).
struct ResourceSpec {
  Family family = Family::Ghz3;
  double p = 0.5;  // weight parameter for Nmm / Tmes
  double a = 0.5;  // unitary parameter for PhiU
  std::array<BellKind, 4> kets = {BellKind::PhiPlus, BellKind::PhiMinus,
                                  BellKind::PsiPlus, BellKind::PsiMinus};

  /// Parses a plain-text block of key=value lines ('#' starts a comment):
  ///   family = ghz3 | nmm | phi_u | ghz4 | cluster4 | r1 | four_general | tmes
  ///   p = <real in the family's domain>      (nmm, tmes)
  ///   a = <real in [0,1]>                    (phi_u)
  ///   kets = <4 comma-separated of phi+,phi-,psi+,psi->  (four_general)
  static ResourceSpec parse(const std::string& text);
  std::string describe() const;
};

qcore::StateVector build(const ResourceSpec& spec);

/// Four-qubit resource (|00>k1 + |01>k2 + |10>k3 + |11>k4)/2 from explicit
/// two-qubit kets; each ket must have concurrence 1.
qcore::StateVector build_four_general(
    const std::array<qcore::StateVector, 4>& kets);

/// Weight p at which the one-parameter-unitary family and the two-branch
/// family give the controller's qubit the same entropy: p = (1 - sqrt(a))/2.
double lu_match_parameter(double a);

/// The one-parameter unitary U(a) used by the PhiU family.
Eigen::Matrix2cd entropy_match_unitary(double a);

/// Two-qubit block unitary that turns |0>|phi+> into the Nmm(p) resource.
Eigen::Matrix4cd tmes_unitary(double p);

/// (U x I)|0>|phi+>; equal to build(Nmm(p)) exactly.
qcore::StateVector tmes_construct(double p);

enum class Suitability {
  Mmm,
  Nmm,
  Mnm,
  Mmn,
  Unsuitable,
  FourQubitOk,
  FourQubitUnsuitable,
};

struct SuitabilityVerdict {
  std::vector<double> marginal_entropies;
  Suitability klass = Suitability::Unsuitable;
  std::vector<char> controllers;  // parties that must hold the control qubits
  bool any_may_control = false;
  std::string describe() const;
};

const char* to_string(Suitability s);

/// Classifies a 3- or 4-qubit pure state by its marginal-entropy structure.
/// Three qubits: all marginals maximal, or exactly one non-maximal qubit
/// (the controller's). Four qubits: at least two maximal marginals and every
/// computational-basis collapse on the two controller qubits must leave a
/// concurrence-1 state on the remaining pair.
SuitabilityVerdict classify(const qcore::StateVector& s);

}  // namespace coqkd::states
