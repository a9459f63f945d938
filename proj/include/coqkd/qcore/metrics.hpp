#pragma once

#include "coqkd/qcore/state.hpp"

namespace coqkd::qcore {

/// Two-qubit pure-state concurrence |<psi| sy x sy |psi*>| in [0, 1].
double concurrence(const StateVector& s);

/// Optimal teleportation fidelity of a two-qubit channel state:
/// F = (1 + Tr sqrt(T^dag T) / 3) / 2 with T_ab = Tr[(sa x sb) rho] over
/// a, b in {x, y, z}.
double teleport_fidelity_bound(const DensityMatrix& rho);

/// The 3x3 correlation matrix T used by teleport_fidelity_bound.
Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho);

}  // namespace coqkd::qcore
