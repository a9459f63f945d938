#include "coqkd/protocol/collapse.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "coqkd/qcore/metrics.hpp"
#include "coqkd/states/resource.hpp"

namespace coqkd::protocol {

using qcore::StateVector;

std::array<CollapsedBranch, 2> collapse_three(double p, cx n) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("collapse_three requires p in (0,1)");
  }
  const StateVector resource =
      states::build({.family = states::Family::Nmm, .p = p});
  const auto branches =
      qcore::measure(resource, qcore::QubitBasis{n}.basis(), {'C'});

  const double sp = std::sqrt(p);
  const double sq = std::sqrt(1.0 - p);
  const double nn = 1.0 / std::sqrt(1.0 + std::norm(n));
  const double p_plus = nn * nn * (p + std::norm(n) * (1.0 - p));
  const double p_minus = nn * nn * (p * std::norm(n) + (1.0 - p));

  std::array<CollapsedBranch, 2> out;
  // "+" branch: amplitudes proportional to (sqrt(p) + conj(n) sqrt(1-p)) |00>
  // and (sqrt(p) - conj(n) sqrt(1-p)) |11>.
  {
    CollapsedBranch& b = out[0];
    b.outcome = "+";
    b.probability = p_plus;
    b.state = branches[0].empty_branch ? StateVector() : branches[0].state;
    const cx denom = sp + std::conj(n) * sq;
    b.canonical_finite = std::abs(denom) > qcore::kBranchCutoff;
    b.big_n = nn * denom / std::sqrt(2.0 * p_plus);
    b.little_n = b.canonical_finite
                     ? (sp - std::conj(n) * sq) / denom
                     : cx{std::numeric_limits<double>::infinity(), 0.0};
  }
  // "-" branch: proportional to (sqrt(1-p) - n sqrt(p)) |00> minus
  // (sqrt(1-p) + n sqrt(p)) |11>.
  {
    CollapsedBranch& b = out[1];
    b.outcome = "-";
    b.probability = p_minus;
    b.state = branches[1].empty_branch ? StateVector() : branches[1].state;
    const cx denom = sq - n * sp;
    b.canonical_finite = std::abs(denom) > qcore::kBranchCutoff;
    b.big_n = nn * denom / std::sqrt(2.0 * p_minus);
    b.little_n = b.canonical_finite
                     ? -(sq + n * sp) / denom
                     : cx{std::numeric_limits<double>::infinity(), 0.0};
  }
  return out;
}

double qber_analytic(double p, double n) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("qber_analytic requires p in (0,1)");
  }
  const double n2 = n * n;
  return n2 * (1.0 - p) / (2.0 * (n2 * (1.0 - p) + p));
}

double two_basis_qber_exact(const qcore::StateVector& s, cx basis_n) {
  if (s.num_qubits() != 2) {
    throw std::invalid_argument("two_basis_qber_exact needs a two-qubit state");
  }
  const auto comp = qcore::computational_basis(1);
  const auto tilted = qcore::QubitBasis{basis_n}.basis();
  auto mismatch = [&](const qcore::MeasurementBasis& b) {
    // P(outcomes differ) when both parties use basis b.
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      cx amp{0.0, 0.0};
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          amp += std::conj(b.kets[i](x) * b.kets[j](y)) * s.amp(2 * x + y);
        }
      }
      sum += std::norm(amp);
    }
    return sum;
  };
  return 0.5 * (mismatch(comp) + mismatch(tilted));
}

double relative_key_rate(double q) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw std::domain_error("relative_key_rate requires Q in [0, 1/2]");
  }
  double r = 1.0;
  if (q > 0.0) r += q * std::log2(q);
  if (q < 1.0) r += (1.0 - q) * std::log2(1.0 - q);
  return r;
}

SecuritySettings security_settings(double n_canonical) {
  return security_settings_from_correlation(
      2.0 * n_canonical / (1.0 + n_canonical * n_canonical));
}

SecuritySettings security_settings_from_correlation(double u) {
  const double scale = std::sqrt(1.0 + u * u);
  const double ct = 1.0 / scale;
  const double st = u / scale;
  SecuritySettings s{
      .a1 = qcore::sigma_z(),
      .a2 = qcore::pauli_combo(st, 0.0, ct),
      .a3 = qcore::sigma_x(),
      .b1 = qcore::pauli_combo(st, 0.0, ct),
      .b2 = qcore::sigma_x(),
      .b3 = qcore::pauli_combo(-st, 0.0, ct),
      .theta = std::atan2(st, ct),
      .chsh_expected = 2.0 * scale,
  };
  return s;
}

double canonical_n(const qcore::StateVector& two_qubit) {
  if (two_qubit.num_qubits() != 2) {
    throw std::invalid_argument("canonical_n needs a two-qubit state");
  }
  const auto& a = two_qubit.amplitudes();
  if (std::abs(a(1)) > 1e-9 || std::abs(a(2)) > 1e-9) {
    throw std::domain_error("state is outside the |00>,|11> canonical family");
  }
  if (std::abs(a(0)) < 1e-9) {
    throw std::domain_error("canonical n diverges (|00> amplitude vanishes)");
  }
  const cx ratio = a(3) / a(0);
  if (std::abs(ratio.imag()) > 1e-9 * (1.0 + std::abs(ratio))) {
    throw std::domain_error("canonical n is not real");
  }
  return ratio.real();
}

double second_qubit_limit(double p, cx n) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("second_qubit_limit requires p in (0,1)");
  }
  const StateVector resource =
      states::build({.family = states::Family::Nmm, .p = p});
  const auto branches =
      qcore::measure(resource, qcore::QubitBasis{n}.basis(), {'A'});
  double best = 0.0;
  for (const auto& b : branches) {
    if (b.empty_branch) continue;
    best = std::max(best, qcore::concurrence(b.state));
  }
  return best;
}

}  // namespace coqkd::protocol
