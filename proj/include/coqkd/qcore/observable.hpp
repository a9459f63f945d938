#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coqkd/qcore/state.hpp"

namespace coqkd::qcore {

/// Hermitian single-qubit operator with a human-readable label.
struct Observable {
  Eigen::Matrix2cd matrix;
  std::string label;

  Observable(Eigen::Matrix2cd m, std::string l);
};

Observable sigma_x();
Observable sigma_y();
Observable sigma_z();
Observable identity_obs();

/// x*sx + y*sy + z*sz; dichotomic (eigenvalues +-1) when (x,y,z) is a unit
/// vector.
Observable pauli_combo(double x, double y, double z);

/// Eigenvectors of a dichotomic observable, ordered (+1 eigenvector, -1
/// eigenvector).
std::pair<Eigen::Vector2cd, Eigen::Vector2cd> dichotomic_eigenvectors(
    const Observable& o);

/// <psi| O_1 x O_2 x ... |psi> with one observable per listed party and
/// identity on everyone else. The result must be real (Hermitian product).
double expectation(const StateVector& s,
                   const std::vector<std::pair<char, Observable>>& per_party);

/// E(A1,B1) + E(A1,B2) + E(A2,B1) - E(A2,B2) on a two-qubit state; the first
/// party in qubit_order takes the A observables.
double chsh_value(const StateVector& s, const Observable& a1,
                  const Observable& a2, const Observable& b1,
                  const Observable& b2);

}  // namespace coqkd::qcore
