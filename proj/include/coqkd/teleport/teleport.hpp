#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "coqkd/protocol/collapse.hpp"

namespace coqkd::teleport {

/// One point of the fidelity/concurrence sweep over the controller's basis
/// parameter. The averages weight each collapse branch by its probability.
struct TeleportSweepPoint {
  double p = 0.0, n = 0.0;
  double p_plus = 0.0, p_minus = 0.0;
  double f_plus = 0.0, f_minus = 0.0, f_avg = 0.0;
  double c_plus = 0.0, c_minus = 0.0, c_avg = 0.0;
};

/// Branch fidelities from the correlation-matrix bound and branch
/// concurrences, for every n in the grid.
std::vector<TeleportSweepPoint> sweep(double p, const std::vector<double>& n_grid);

/// Vertices of a regular dodecahedron on the unit sphere; exact for averaging
/// polynomials of degree <= 3, which covers the output fidelity.
const std::array<std::array<double, 3>, 20>& sphere_design_20();

/// Full round-trip simulation: the controller measures in the n-basis, the
/// sender Bell-measures the input against her half, the receiver applies the
/// standard Pauli correction for the announced outcomes. Returns the mean
/// output fidelity over the rounds for one input (theta, phi in Bloch angles).
double simulate_roundtrip(double p, double n, double theta, double phi,
                          std::uint64_t seed, long rounds, bool parallel = true);

/// Mean of simulate_roundtrip over the 20-point spherical design.
double simulate_roundtrip_design_mean(double p, double n, std::uint64_t seed,
                                      long rounds_per_input,
                                      bool parallel = true);

}  // namespace coqkd::teleport
