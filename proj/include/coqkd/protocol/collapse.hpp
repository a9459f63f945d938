#pragma once

#include <array>
#include <string>

#include "coqkd/qcore/measure.hpp"
#include "coqkd/qcore/observable.hpp"

namespace coqkd::protocol {

using qcore::cx;

/// One branch of the controller's measurement on the three-qubit resource.
/// The canonical form is big_n * (|00> + little_n |11>) up to a global phase;
/// canonical_finite is false when the |00> amplitude vanishes (the branch is
/// the |11> limit and little_n diverges).
struct CollapsedBranch {
  std::string outcome;
  double probability = 0.0;
  qcore::StateVector state;  // on (A, B)
  cx big_n{};
  cx little_n{};
  bool canonical_finite = true;
};

/// Controller measurement in the one-parameter basis on the Nmm(p) resource.
/// Returns the "+" and "-" branches with canonical parameters.
std::array<CollapsedBranch, 2> collapse_three(double p, cx n);

/// Two-basis error rate of the collapsed "+" branch as a closed form:
/// n^2 (1-p) / (2 (n^2 (1-p) + p)).
double qber_analytic(double p, double n);

/// Error probability of a two-qubit state measured by both parties in the
/// computational basis or the |+-_n> basis (chosen uniformly), conditioned on
/// matching bases. Serves as the exact oracle for the closed form above.
double two_basis_qber_exact(const qcore::StateVector& s, cx basis_n);

/// r = 1 + Q log2 Q + (1-Q) log2 (1-Q) for Q in [0, 1/2].
double relative_key_rate(double q);

/// Measurement menu tuned to a canonical state (|00> + n|11>)/sqrt(1+n^2).
/// Key pairs are (a2,b1) and (a3,b2); test pairs (a1,b1), (a1,b3), (a3,b1),
/// (a3,b3) reach the optimal value 2 sqrt(1 + 4 n^2 N^4).
struct SecuritySettings {
  qcore::Observable a1, a2, a3;
  qcore::Observable b1, b2, b3;
  double theta = 0.0;
  double chsh_expected = 0.0;
};

SecuritySettings security_settings(double n_canonical);

/// Same menu parametrized by the state's x-correlation u = 2n/(1+n^2); total
/// for every state in the canonical family including the |11> limit (u = 0).
SecuritySettings security_settings_from_correlation(double u);

/// Extracts the real canonical parameter n from a state in the span of
/// {|00>, |11>}; throws when the state is outside the family or n is not real.
double canonical_n(const qcore::StateVector& two_qubit);

/// Largest branch concurrence when the controller measures the second qubit
/// (a maximally mixed one) instead of its own.
double second_qubit_limit(double p, cx n);

}  // namespace coqkd::protocol
