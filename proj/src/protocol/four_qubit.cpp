#include "coqkd/protocol/four_qubit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "coqkd/qcore/metrics.hpp"
#include "coqkd/states/resource.hpp"

namespace coqkd::protocol {

namespace {

using qcore::StateVector;

void check_standard_bell_kets(const StateVector& resource) {
  const std::vector<char> controllers = {resource.qubit_order()[0],
                                         resource.qubit_order()[1]};
  const auto branches =
      qcore::measure(resource, qcore::computational_basis(2), controllers);
  const states::BellKind expected[4] = {
      states::BellKind::PhiPlus, states::BellKind::PhiMinus,
      states::BellKind::PsiPlus, states::BellKind::PsiMinus};
  for (int i = 0; i < 4; ++i) {
    const StateVector ref =
        states::bell(expected[i], resource.qubit_order()[2],
                     resource.qubit_order()[3]);
    if (branches[i].empty_branch ||
        std::abs(branches[i].probability - 0.25) > 1e-9 ||
        !qcore::approx_equal(branches[i].state, ref, 1e-9)) {
      throw std::invalid_argument(
          "closed-form comparison requires the four standard Bell kets");
    }
  }
}

}  // namespace

ProtocolReport four_qubit_run(const qcore::StateVector& resource,
                              const FourQubitOptions& opts) {
  if (resource.num_qubits() != 4) {
    throw std::invalid_argument("four_qubit_run needs a four-qubit resource");
  }
  if (opts.compare_formula) {
    check_standard_bell_kets(resource);
  }
  const char dennis = resource.qubit_order()[0];
  const char charlie = resource.qubit_order()[1];

  StateVector pair_state;
  double controller_prob = 0.0;
  double formula = 0.0;
  if (opts.path == FourQubitOptions::Path::Sequential) {
    const auto after_dennis = qcore::measure(
        resource, qcore::QubitBasis{cx{opts.beta, 0.0}}.basis(), {dennis});
    if (after_dennis[0].empty_branch) {
      throw std::domain_error("the + outcome of the first controller vanishes");
    }
    const auto after_charlie =
        qcore::measure(after_dennis[0].state,
                       qcore::QubitBasis{cx{opts.alpha, 0.0}}.basis(),
                       {charlie});
    if (after_charlie[0].empty_branch) {
      throw std::domain_error("the + outcome of the second controller vanishes");
    }
    pair_state = after_charlie[0].state;
    controller_prob =
        after_dennis[0].probability * after_charlie[0].probability;
    formula = opts.beta * opts.beta / (1.0 + opts.beta * opts.beta) +
              opts.alpha * opts.alpha / (1.0 + opts.alpha * opts.alpha);
  } else {
    const auto joint = qcore::measure(
        resource, qcore::JointBasis{cx{opts.m, 0.0}}.basis(),
        {dennis, charlie});
    if (joint[0].empty_branch) {
      throw std::domain_error("the chi+ outcome vanishes");
    }
    pair_state = joint[0].state;
    controller_prob = joint[0].probability;
    formula = opts.m * opts.m / (1.0 + opts.m * opts.m);
  }

  RunOptions run_opts;
  run_opts.mode = RunMode::KeyrateOnly;
  run_opts.rounds = opts.rounds;
  run_opts.seed = opts.seed;
  run_opts.basis_n = 1.0;  // announced sifting bases: computational and |+-_x>
  run_opts.parallel = opts.parallel;
  ProtocolReport report = run_rounds(pair_state, run_opts);

  report.branch_label = opts.path == FourQubitOptions::Path::Sequential
                            ? "++"
                            : "chi+";
  report.branch_probability = controller_prob;
  report.controller_outcome_probability = controller_prob;
  report.q_oracle = two_basis_qber_exact(pair_state, cx{1.0, 0.0});
  report.q_formula = opts.compare_formula
                         ? formula
                         : std::numeric_limits<double>::quiet_NaN();
  report.q_formula_agrees =
      opts.compare_formula &&
      std::abs(report.q_formula - report.q_oracle) <= qcore::kTolOpt;
  return report;
}

}  // namespace coqkd::protocol
