#include "coqkd/teleport/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coqkd/qcore/metrics.hpp"
#include "coqkd/rng.hpp"

namespace coqkd::teleport {

namespace {

using protocol::CollapsedBranch;
using qcore::cx;
using qcore::StateVector;

StateVector bloch_ket(double theta, double phi, char label) {
  if (!(theta >= 0.0 && theta <= M_PI)) {
    throw std::domain_error("theta must lie in [0, pi]");
  }
  Eigen::VectorXcd a(2);
  a(0) = std::cos(theta / 2.0);
  a(1) = std::polar(std::sin(theta / 2.0), phi);
  return StateVector(std::move(a), {label});
}

// Receiver corrections per Bell outcome, in the basis order of the joint
// measurement at m = 1: chi+, chi-, zeta+, zeta-.
std::array<Eigen::Matrix2cd, 4> corrections() {
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd z, x;
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  return {id, z, x, z * x};
}

// Outcome probabilities and post-correction fidelities for teleporting the
// input through one collapse branch.
struct BranchCell {
  std::array<double, 4> prob{};
  std::array<double, 4> fidelity{};
};

BranchCell branch_cell(const StateVector& input,
                       const StateVector& channel) {
  BranchCell cell;
  const StateVector joint = qcore::tensor(input, channel);
  const char sender = input.qubit_order()[0];
  const char near = channel.qubit_order()[0];
  const auto outcomes = qcore::measure(
      joint, qcore::JointBasis{cx{1.0, 0.0}}.basis(), {sender, near});
  auto fix = corrections();
  // The announced branch fixes the channel's amplitude ratio; a negative
  // ratio is a known phase flip the receiver undoes before the Pauli table.
  const cx ratio_dir =
      std::conj(channel.amp(0)) * channel.amp(channel.dim() - 1);
  if (ratio_dir.real() < 0.0) {
    Eigen::Matrix2cd z;
    z << 1, 0, 0, -1;
    for (auto& u : fix) u = u * z;
  }
  for (int k = 0; k < 4; ++k) {
    cell.prob[k] = outcomes[k].probability;
    if (outcomes[k].empty_branch) {
      cell.fidelity[k] = 0.0;
      continue;
    }
    StateVector out = qcore::apply_one(
        outcomes[k].state, outcomes[k].state.qubit_order()[0], fix[k]);
    // Overlap with the input state on the receiver's qubit.
    cx ov = cx{0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
      ov += std::conj(input.amp(i)) * out.amp(i);
    }
    cell.fidelity[k] = std::norm(ov);
  }
  return cell;
}

}  // namespace

std::vector<TeleportSweepPoint> sweep(double p,
                                      const std::vector<double>& n_grid) {
  std::vector<TeleportSweepPoint> out;
  out.reserve(n_grid.size());
  for (const double n : n_grid) {
    const auto branches = protocol::collapse_three(p, cx{n, 0.0});
    TeleportSweepPoint pt;
    pt.p = p;
    pt.n = n;
    pt.p_plus = branches[0].probability;
    pt.p_minus = branches[1].probability;
    pt.f_plus = qcore::teleport_fidelity_bound(qcore::density(branches[0].state));
    pt.f_minus = qcore::teleport_fidelity_bound(qcore::density(branches[1].state));
    pt.c_plus = qcore::concurrence(branches[0].state);
    pt.c_minus = qcore::concurrence(branches[1].state);
    pt.f_avg = pt.p_plus * pt.f_plus + pt.p_minus * pt.f_minus;
    pt.c_avg = pt.p_plus * pt.c_plus + pt.p_minus * pt.c_minus;
    out.push_back(pt);
  }
  return out;
}

const std::array<std::array<double, 3>, 20>& sphere_design_20() {
  static const std::array<std::array<double, 3>, 20> pts = [] {
    std::array<std::array<double, 3>, 20> v{};
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    const double r = std::sqrt(3.0);
    int k = 0;
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        for (int sz : {-1, 1}) {
          v[k++] = {sx / r, sy / r, sz / r};
        }
      }
    }
    for (int s1 : {-1, 1}) {
      for (int s2 : {-1, 1}) {
        v[k++] = {0.0, s1 / (g * r), s2 * g / r};
        v[k++] = {s1 / (g * r), s2 * g / r, 0.0};
        v[k++] = {s1 * g / r, 0.0, s2 / (g * r)};
      }
    }
    return v;
  }();
  return pts;
}

double simulate_roundtrip(double p, double n, double theta, double phi,
                          std::uint64_t seed, long rounds, bool parallel) {
  if (rounds < 1) {
    throw std::invalid_argument("rounds must be >= 1");
  }
  const auto branches = protocol::collapse_three(p, cx{n, 0.0});
  const StateVector input = bloch_ket(theta, phi, 'X');
  const BranchCell cells[2] = {branch_cell(input, branches[0].state),
                               branch_cell(input, branches[1].state)};
  const double p_plus = branches[0].probability;

  // Outcome cells carry fixed fidelities, so sampling only needs counts;
  // integer tallies keep the serial and parallel paths bit-identical.
  std::array<long, 8> counts{};
  auto sample_cell = [&](long i) {
    RoundRng rng(seed, static_cast<std::uint64_t>(i));
    const int b = rng.uniform() < p_plus ? 0 : 1;
    const double u = rng.uniform();
    int k = 0;
    double acc = 0.0;
    for (; k < 3; ++k) {
      acc += cells[b].prob[k];
      if (u < acc) break;
    }
    return b * 4 + k;
  };
#ifdef _OPENMP
  if (parallel) {
    long raw[8] = {0, 0, 0, 0, 0, 0, 0, 0};
#pragma omp parallel for schedule(static) reduction(+ : raw[:8])
    for (long i = 0; i < rounds; ++i) raw[sample_cell(i)]++;
    for (int j = 0; j < 8; ++j) counts[j] = raw[j];
  } else {
    for (long i = 0; i < rounds; ++i) counts[sample_cell(i)]++;
  }
#else
  (void)parallel;
  for (long i = 0; i < rounds; ++i) counts[sample_cell(i)]++;
#endif

  double total = 0.0;
  for (int b = 0; b < 2; ++b) {
    for (int k = 0; k < 4; ++k) {
      total += static_cast<double>(counts[b * 4 + k]) * cells[b].fidelity[k];
    }
  }
  return total / static_cast<double>(rounds);
}

double simulate_roundtrip_design_mean(double p, double n, std::uint64_t seed,
                                      long rounds_per_input, bool parallel) {
  const auto& design = sphere_design_20();
  double sum = 0.0;
  for (std::size_t j = 0; j < design.size(); ++j) {
    const auto& v = design[j];
    const double theta = std::acos(std::clamp(v[2], -1.0, 1.0));
    const double phi = std::atan2(v[1], v[0]);
    sum += simulate_roundtrip(p, n, theta, phi, derive_seed(seed, j),
                              rounds_per_input, parallel);
  }
  return sum / static_cast<double>(design.size());
}

}  // namespace coqkd::teleport
