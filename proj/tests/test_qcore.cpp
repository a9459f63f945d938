#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coqkd/protocol/collapse.hpp"
#include "coqkd/qcore/measure.hpp"
#include "coqkd/qcore/metrics.hpp"
#include "coqkd/qcore/observable.hpp"
#include "coqkd/qcore/state.hpp"
#include "coqkd/states/resource.hpp"
#include "oracles.hpp"

using namespace coqkd;
using qcore::cx;
using qcore::StateVector;

namespace {

StateVector ket(const std::string& bits, const std::vector<char>& order) {
  return qcore::computational_ket(bits, order);
}

StateVector nmm(double p) {
  return states::build({.family = states::Family::Nmm, .p = p});
}

const StateVector kGhz = states::build({.family = states::Family::Ghz3});

}  // namespace

TEST_CASE("tensor products compose amplitudes and labels") {
  const auto s00 = qcore::tensor(ket("0", {'A'}), ket("0", {'B'}));
  CHECK(s00.qubit_order() == std::vector<char>{'A', 'B'});
  CHECK(std::abs(s00.amp(0) - 1.0) < 1e-15);

  const auto phi = states::bell(states::BellKind::PhiPlus, 'A', 'B');
  const auto s = qcore::tensor(ket("0", {'C'}), phi);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.amp(0) - r) < 1e-15);
  CHECK(std::abs(s.amp(3) - r) < 1e-15);
  CHECK(std::abs(s.amp(4)) < 1e-15);

  const auto m = qcore::tensor(ket("1", {'C'}),
                               states::bell(states::BellKind::PhiMinus, 'A', 'B'));
  CHECK(std::abs(m.amp(4) - r) < 1e-15);
  CHECK(std::abs(m.amp(7) + r) < 1e-15);

  CHECK_THROWS_AS(qcore::tensor(ket("0", {'A'}), ket("0", {'A'})),
                  std::invalid_argument);
}

TEST_CASE("partial trace reduces to the expected marginals") {
  const auto rho_a = qcore::partial_trace(qcore::density(kGhz), {'A'});
  CHECK(std::abs(rho_a.entries()(0, 0).real() - 0.5) < 1e-12);
  CHECK(std::abs(rho_a.entries()(0, 1)) < 1e-12);

  // The controller's marginal of the weighted resource is diag(p, 1-p).
  const double p = 0.3;
  const auto rho_c = qcore::partial_trace(qcore::density(nmm(p)), {'C'});
  CHECK(std::abs(rho_c.entries()(0, 0).real() - p) < 1e-12);
  CHECK(std::abs(rho_c.entries()(1, 1).real() - (1 - p)) < 1e-12);
  CHECK(std::abs(rho_c.entries()(0, 1)) < 1e-12);

  // Cross-check against the dense index-loop implementation; mask bit 0
  // keeps the leftmost label.
  const auto dense_c =
      oracles::partial_trace_dense(qcore::density(nmm(p)).entries(), 3, 1u);
  CHECK((rho_c.entries() - dense_c).cwiseAbs().maxCoeff() < 1e-14);
  const auto rho_ab = qcore::partial_trace(qcore::density(nmm(p)), {'A', 'B'});
  const auto dense_ab =
      oracles::partial_trace_dense(qcore::density(nmm(p)).entries(), 3, 0b110u);
  CHECK((rho_ab.entries() - dense_ab).cwiseAbs().maxCoeff() < 1e-14);

  const auto prod = qcore::tensor(
      ket("0", {'C'}), states::bell(states::BellKind::PhiPlus, 'A', 'B'));
  const auto rho_first = qcore::partial_trace(qcore::density(prod), {'C'});
  CHECK(std::abs(rho_first.entries()(0, 0).real() - 1.0) < 1e-12);

  CHECK_THROWS_AS(qcore::partial_trace(qcore::density(kGhz), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(qcore::partial_trace(qcore::density(kGhz), {'Q'}),
                  std::invalid_argument);
}

TEST_CASE("partial trace of random pure states is a valid density matrix") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const StateVector s(oracles::random_state(8, 100 + seed), {'A', 'B', 'C'});
    // The DensityMatrix constructor validates hermiticity, trace, and
    // positivity, so surviving construction is the property.
    const auto rho = qcore::partial_trace(qcore::density(s), {'A', 'C'});
    CHECK(rho.num_qubits() == 2);
  }
}

TEST_CASE("von Neumann entropy in bits") {
  Eigen::MatrixXcd half = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  CHECK(qcore::von_neumann_entropy(qcore::DensityMatrix(half, {'A'})) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto pure = qcore::density(ket("0", {'A'}));
  CHECK(qcore::von_neumann_entropy(pure) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::MatrixXcd quarter(2, 2);
  quarter << 0.25, 0, 0, 0.75;
  const double s =
      qcore::von_neumann_entropy(qcore::DensityMatrix(quarter, {'A'}));
  CHECK(std::abs(s - oracles::binary_entropy(0.25)) < 1e-12);
  CHECK(std::abs(s - 0.8112781244591328) < 1e-12);

  Eigen::MatrixXcd bad(2, 2);
  bad << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(qcore::DensityMatrix(bad, {'A'}), std::domain_error);
}

TEST_CASE("entropy is invariant under unitaries on the traced-out side") {
  const auto rho = qcore::partial_trace(qcore::density(nmm(0.37)), {'C'});
  const double base = qcore::von_neumann_entropy(rho);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    StateVector rotated = qcore::apply_one(nmm(0.37), 'A',
                                           oracles::random_unitary2(seed));
    rotated = qcore::apply_one(rotated, 'B',
                               oracles::random_unitary2(seed + 1000));
    const double s = qcore::von_neumann_entropy(
        qcore::partial_trace(qcore::density(rotated), {'C'}));
    CHECK(std::abs(s - base) < 1e-10);
  }
}

TEST_CASE("measurement collapse on the shared states") {
  const auto branches =
      qcore::measure(kGhz, qcore::QubitBasis{cx{1.0, 0.0}}.basis(), {'C'});
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(branches[1].probability == doctest::Approx(0.5).epsilon(1e-12));
  const auto phi_p = states::bell(states::BellKind::PhiPlus, 'A', 'B');
  const auto phi_m = states::bell(states::BellKind::PhiMinus, 'A', 'B');
  CHECK(qcore::approx_equal_up_to_phase(branches[0].state, phi_p, 1e-12));
  CHECK(qcore::approx_equal_up_to_phase(branches[1].state, phi_m, 1e-12));

  // At the matched point the "+" collapse is separable.
  const auto sep =
      qcore::measure(nmm(0.5), qcore::QubitBasis{cx{1.0, 0.0}}.basis(), {'C'});
  CHECK(qcore::approx_equal_up_to_phase(sep[0].state, ket("00", {'A', 'B'}),
                                        1e-12));

  const auto comp = qcore::measure(nmm(0.3), qcore::computational_basis(1),
                                   {'C'});
  CHECK(comp[0].probability == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(comp[1].probability == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(qcore::approx_equal_up_to_phase(comp[0].state, phi_p, 1e-12));
  CHECK(qcore::approx_equal_up_to_phase(comp[1].state, phi_m, 1e-12));

  CHECK_THROWS_AS(
      qcore::measure(kGhz, qcore::JointBasis{cx{1.0, 0.0}}.basis(), {'C'}),
      std::invalid_argument);
}

TEST_CASE("branch probabilities sum to one for random states and bases") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const StateVector s(oracles::random_state(8, 500 + seed), {'A', 'B', 'C'});
    oracles::Gaussians g(900 + seed);
    const cx n = g.next_complex();
    const auto branches = qcore::measure(s, qcore::QubitBasis{n}.basis(), {'B'});
    double total = 0.0;
    for (const auto& b : branches) total += b.probability;
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("zero-probability branches stay in the list with the empty flag") {
  const auto branches =
      qcore::measure(ket("0", {'A'}), qcore::computational_basis(1), {'A'});
  REQUIRE(branches.size() == 2);
  CHECK(branches[1].probability < 1e-14);
  CHECK(branches[1].empty_branch);
  CHECK_FALSE(branches[0].empty_branch);
}

TEST_CASE("expectation values of Pauli words") {
  const auto phi = states::bell(states::BellKind::PhiPlus, 'A', 'B');
  CHECK(qcore::expectation(phi, {{'A', qcore::sigma_z()}, {'B', qcore::sigma_z()}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qcore::expectation(phi, {{'A', qcore::sigma_x()}, {'B', qcore::sigma_x()}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qcore::expectation(kGhz, {{'C', qcore::sigma_y()},
                                  {'A', qcore::sigma_y()},
                                  {'B', qcore::sigma_x()}}) ==
        doctest::Approx(-1.0).epsilon(1e-12));

  Eigen::Matrix2cd non_hermitian;
  non_hermitian << 0, 1, 0, 0;
  CHECK_THROWS_AS(qcore::Observable(non_hermitian, "bad"),
                  std::invalid_argument);
}

TEST_CASE("chsh value with the tuned settings") {
  const auto phi = states::bell(states::BellKind::PhiPlus, 'A', 'B');
  const auto bell_settings = protocol::security_settings(1.0);
  const double s = qcore::chsh_value(phi, bell_settings.a1, bell_settings.a3,
                                     bell_settings.b1, bell_settings.b3);
  CHECK(std::abs(s - 2.0 * std::sqrt(2.0)) < 1e-12);

  // Partially entangled family member: closed form against the maximizer.
  const double n = 0.5;
  Eigen::VectorXcd amps(4);
  const double norm = std::sqrt(1.0 + n * n);
  amps << 1.0 / norm, 0, 0, n / norm;
  const StateVector partial(amps, {'A', 'B'});
  const auto st = protocol::security_settings(n);
  const double value =
      qcore::chsh_value(partial, st.a1, st.a3, st.b1, st.b3);
  CHECK(std::abs(value - 2.0 * std::sqrt(1.64)) < 1e-9);
  CHECK(std::abs(value - oracles::max_chsh(amps)) < 1e-6);

  // Separable states stay at or below the classical bound.
  const auto product = ket("00", {'A', 'B'});
  const double sep = qcore::chsh_value(product, st.a1, st.a3, st.b1, st.b3);
  CHECK(sep <= 2.0 + 1e-12);
}

TEST_CASE("unit Pauli combinations are dichotomic") {
  oracles::Gaussians g(808);
  for (int k = 0; k < 10; ++k) {
    Eigen::Vector3d v;
    v << g.next(), g.next(), g.next();
    v.normalize();
    const auto obs = qcore::pauli_combo(v(0), v(1), v(2));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(obs.matrix);
    CHECK(std::abs(es.eigenvalues()(0) + 1.0) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(1) - 1.0) < 1e-12);
  }
}

TEST_CASE("chsh never exceeds the quantum bound over random settings") {
  oracles::Gaussians g(4242);
  auto random_obs = [&] {
    Eigen::Vector3d v;
    v << g.next(), g.next(), g.next();
    v.normalize();
    return qcore::pauli_combo(v(0), v(1), v(2));
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const StateVector s(oracles::random_state(4, 700 + seed), {'A', 'B'});
    const double v = qcore::chsh_value(s, random_obs(), random_obs(),
                                       random_obs(), random_obs());
    CHECK(std::abs(v) <= 2.0 * std::sqrt(2.0) + 1e-9);
  }
}

TEST_CASE("concurrence of pure two-qubit states") {
  CHECK(qcore::concurrence(states::bell(states::BellKind::PhiPlus, 'A', 'B')) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qcore::concurrence(ket("00", {'A', 'B'})) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const double n = 0.5;
  Eigen::VectorXcd amps(4);
  const double norm = std::sqrt(1.0 + n * n);
  amps << 1.0 / norm, 0, 0, n / norm;
  CHECK(qcore::concurrence(StateVector(amps, {'A', 'B'})) ==
        doctest::Approx(0.8).epsilon(1e-12));

  CHECK_THROWS_AS(qcore::concurrence(kGhz), std::invalid_argument);
}

TEST_CASE("concurrence is invariant under local unitaries") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const StateVector s(oracles::random_state(4, 300 + seed), {'A', 'B'});
    const double c = qcore::concurrence(s);
    StateVector rotated =
        qcore::apply_one(s, 'A', oracles::random_unitary2(seed * 7 + 1));
    rotated =
        qcore::apply_one(rotated, 'B', oracles::random_unitary2(seed * 7 + 2));
    CHECK(std::abs(qcore::concurrence(rotated) - c) < 1e-10);
  }
}

TEST_CASE("maximized chsh matches 2 sqrt(1 + C^2) on the canonical family") {
  for (const double n : {0.1, 0.3, 0.55, 0.8, 1.0}) {
    Eigen::VectorXcd amps(4);
    const double norm = std::sqrt(1.0 + n * n);
    amps << 1.0 / norm, 0, 0, n / norm;
    const double c = qcore::concurrence(StateVector(amps, {'A', 'B'}));
    const double expected = 2.0 * std::sqrt(1.0 + c * c);
    CHECK(std::abs(oracles::max_chsh(amps) - expected) < 1e-9);
    const double u = 2.0 * n / (1.0 + n * n);
    CHECK(std::abs(expected - 2.0 * std::sqrt(1.0 + 4.0 * n * n /
                                              ((1 + n * n) * (1 + n * n)))) <
          1e-12);
    CHECK(std::abs(c - u) < 1e-12);
  }
}

TEST_CASE("teleportation fidelity bound from the correlation matrix") {
  const auto phi = qcore::density(states::bell(states::BellKind::PhiPlus, 'A', 'B'));
  CHECK(qcore::teleport_fidelity_bound(phi) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto product = qcore::density(ket("00", {'A', 'B'}));
  CHECK(qcore::teleport_fidelity_bound(product) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // On the canonical family the bound is (2 + C) / 3.
  for (const double n : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    Eigen::VectorXcd amps(4);
    const double norm = std::sqrt(1.0 + n * n);
    amps << 1.0 / norm, 0, 0, n / norm;
    const StateVector s(amps, {'A', 'B'});
    const double f = qcore::teleport_fidelity_bound(qcore::density(s));
    const double c = qcore::concurrence(s);
    CHECK(std::abs(f - (2.0 + c) / 3.0) < 1e-10);
  }
}
