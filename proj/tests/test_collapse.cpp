#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coqkd/protocol/collapse.hpp"
#include "coqkd/qcore/metrics.hpp"
#include "coqkd/states/resource.hpp"
#include "oracles.hpp"

using namespace coqkd;
using protocol::collapse_three;
using qcore::cx;
using qcore::StateVector;

namespace {

StateVector canonical_state(cx big_n, cx little_n) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps(0) = big_n;
  amps(3) = big_n * little_n;
  return StateVector::normalized(std::move(amps), {'A', 'B'});
}

}  // namespace

TEST_CASE("controller collapse branches and probabilities") {
  // Computational limit: the two branches are the two Bell states.
  const auto comp = collapse_three(0.5, cx{0.0, 0.0});
  CHECK(comp[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(comp[1].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(qcore::approx_equal_up_to_phase(
      comp[0].state, states::bell(states::BellKind::PhiPlus, 'A', 'B'), 1e-12));
  CHECK(qcore::approx_equal_up_to_phase(
      comp[1].state, states::bell(states::BellKind::PhiMinus, 'A', 'B'),
      1e-12));

  // Matched point: the + branch is separable with vanishing ratio.
  const auto matched = collapse_three(0.5, cx{1.0, 0.0});
  CHECK(std::abs(matched[0].little_n) < 1e-12);
  CHECK(qcore::concurrence(matched[0].state) < 1e-12);

  const auto mixed = collapse_three(0.3, cx{0.5, 0.0});
  CHECK(mixed[0].probability == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(mixed[1].probability == doctest::Approx(0.62).epsilon(1e-12));

  CHECK_THROWS_AS(collapse_three(0.0, cx{0.5, 0.0}), std::domain_error);
}

TEST_CASE("canonical parameters rebuild the measured branches") {
  for (const double p : {0.15, 0.3, 0.5, 0.72, 0.9}) {
    for (const cx n : {cx{0.0, 0.0}, cx{0.4, 0.0}, cx{1.0, 0.0},
                       cx{0.3, 0.4}, cx{0.0, 0.8}}) {
      const auto branches = collapse_three(p, n);
      CHECK(std::abs(branches[0].probability + branches[1].probability - 1.0) <
            1e-12);
      for (const auto& b : branches) {
        if (!b.canonical_finite) {
          // The |00> amplitude vanished; the branch is the |11> limit.
          CHECK(std::abs(b.state.amp(0)) < 1e-9);
          continue;
        }
        const auto rebuilt = canonical_state(b.big_n, b.little_n);
        CHECK(qcore::approx_equal_up_to_phase(b.state, rebuilt, 1e-12));
        // The canonical norm matches the reconstructed amplitudes directly.
        CHECK(std::abs(std::norm(b.big_n) * (1.0 + std::norm(b.little_n)) -
                       1.0) < 1e-12);
      }
    }
  }
  // The minus branch hits the |11> limit when sqrt(1-p) = n sqrt(p).
  const double p = 0.6;
  const double n_star = std::sqrt((1.0 - p) / p);
  const auto at_limit = collapse_three(p, cx{n_star, 0.0});
  CHECK_FALSE(at_limit[1].canonical_finite);
  CHECK(qcore::approx_equal_up_to_phase(
      at_limit[1].state, qcore::computational_ket("11", {'A', 'B'}), 1e-9));
}

TEST_CASE("security settings reach the tuned violation") {
  const auto bell = protocol::security_settings(1.0);
  CHECK(bell.theta == doctest::Approx(M_PI / 4).epsilon(1e-12));
  CHECK(bell.chsh_expected == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

  const auto flat = protocol::security_settings(0.0);
  CHECK(flat.theta == doctest::Approx(0.0));
  CHECK(flat.chsh_expected == doctest::Approx(2.0).epsilon(1e-12));

  const auto mid = protocol::security_settings(0.5);
  CHECK(mid.chsh_expected ==
        doctest::Approx(2.0 * std::sqrt(1.64)).epsilon(1e-12));

  // The tuned menu is optimal: the closed form matches an unconstrained
  // numerical maximization over all dichotomic settings.
  for (const double n : {0.0, 0.2, 0.5, 0.85, 1.0}) {
    const auto s = protocol::security_settings(n);
    const auto state = canonical_state(1.0, cx{n, 0.0});
    const double via_settings =
        qcore::chsh_value(state, s.a1, s.a3, s.b1, s.b3);
    CHECK(std::abs(via_settings - s.chsh_expected) < 1e-9);
    if (n > 0.0) {
      CHECK(std::abs(oracles::max_chsh(state.amplitudes()) - s.chsh_expected) <
            1e-6);
    }
  }

  // Negative ratios flip the tilt but keep the violation.
  const auto neg = protocol::security_settings(-0.5);
  const auto state = canonical_state(1.0, cx{-0.5, 0.0});
  CHECK(std::abs(qcore::chsh_value(state, neg.a1, neg.a3, neg.b1, neg.b3) -
                 neg.chsh_expected) < 1e-9);
}

TEST_CASE("closed-form error rate equals the projector-sum oracle") {
  CHECK(protocol::qber_analytic(0.3, 0.0) == doctest::Approx(0.0));
  CHECK(protocol::qber_analytic(0.5, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(protocol::qber_analytic(0.9, 1.0) == doctest::Approx(0.05).epsilon(1e-12));

  for (const double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    for (const double n : {0.0, 0.2, 0.45, 0.7, 1.0}) {
      const auto branches = collapse_three(p, cx{n, 0.0});
      const double exact = protocol::two_basis_qber_exact(branches[0].state,
                                                          cx{1.0, 0.0});
      CHECK(std::abs(exact - protocol::qber_analytic(p, n)) < 1e-12);
      const double oracle = oracles::projector_qber(
          Eigen::Vector4cd(branches[0].state.amplitudes()), oracles::zbasis(),
          oracles::xbasis());
      CHECK(std::abs(oracle - protocol::qber_analytic(p, n)) < 1e-12);
    }
  }
}

TEST_CASE("relative key rate from the error rate") {
  CHECK(protocol::relative_key_rate(0.0) == doctest::Approx(1.0));
  CHECK(protocol::relative_key_rate(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(protocol::relative_key_rate(0.25) -
                 (1.0 - oracles::binary_entropy(0.25))) < 1e-12);
  CHECK(protocol::relative_key_rate(0.25) ==
        doctest::Approx(0.188722).epsilon(1e-5));
  CHECK_THROWS_AS(protocol::relative_key_rate(-0.01), std::domain_error);
  CHECK_THROWS_AS(protocol::relative_key_rate(0.6), std::domain_error);
}

TEST_CASE("measuring a maximally mixed qubit cannot mint entanglement") {
  CHECK(protocol::second_qubit_limit(0.5, cx{1.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(protocol::second_qubit_limit(0.5, cx{0.0, 0.0}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // At n = 1 the branch concurrence equals twice the geometric mean of the
  // branch weights, the value already present in the resource.
  for (const double p : {0.2, 0.35, 0.5, 0.8}) {
    CHECK(std::abs(protocol::second_qubit_limit(p, cx{1.0, 0.0}) -
                   2.0 * std::sqrt(p * (1.0 - p))) < 1e-9);
  }

  // Away from the balanced point the supremum over the grid stays below one.
  for (const double p : {0.2, 0.35}) {
    double best = 0.0;
    for (int k = 0; k <= 100; ++k) {
      best = std::max(best,
                      protocol::second_qubit_limit(p, cx{k / 100.0, 0.0}));
    }
    CHECK(best < 1.0 - 0.01);
  }
}

TEST_CASE("canonical ratio extraction guards its domain") {
  CHECK(protocol::canonical_n(canonical_state(1.0, cx{0.5, 0.0})) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(
      protocol::canonical_n(states::bell(states::BellKind::PsiPlus, 'A', 'B')),
      std::domain_error);
  CHECK_THROWS_AS(
      protocol::canonical_n(canonical_state(1.0, cx{0.0, 0.5})),
      std::domain_error);
  CHECK_THROWS_AS(
      protocol::canonical_n(qcore::computational_ket("11", {'A', 'B'})),
      std::domain_error);
}
