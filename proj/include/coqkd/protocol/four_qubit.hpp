#pragma once

#include "coqkd/protocol/rounds.hpp"

namespace coqkd::protocol {

/// Four-qubit run configuration. The resource is held as (D, C, A, B).
/// Sequential: Dennis measures first in the basis with parameter beta, then
/// Charlie with alpha; the run conditions on both "+" outcomes. Joint: Charlie
/// holds both control qubits and measures them in the generalized Bell basis
/// with parameter m; the run conditions on the chi+ outcome.
struct FourQubitOptions {
  enum class Path { Sequential, Joint };
  Path path = Path::Sequential;
  double beta = 0.0;
  double alpha = 0.0;
  double m = 0.0;
  long rounds = 100000;
  std::uint64_t seed = 1;
  bool parallel = true;
  /// Compare against the closed-form error rate; requires the resource to be
  /// built from the four standard Bell kets in order.
  bool compare_formula = true;
};

/// Runs the two-basis sifting protocol on the pair left after the controller
/// collapse. qber_analytic and q_oracle hold the exact matched-basis error
/// rate of the collapsed state; q_formula holds the closed form (the oracle is
/// authoritative where they disagree).
ProtocolReport four_qubit_run(const qcore::StateVector& resource,
                              const FourQubitOptions& opts);

}  // namespace coqkd::protocol
