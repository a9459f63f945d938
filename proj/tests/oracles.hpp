#pragma once

// Test-side reference implementations, deliberately independent of the
// library's computation paths: dense matrix algebra with explicit index
// loops, a brute-force CHSH maximizer, and projector-sum error rates.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "coqkd/rng.hpp"

namespace oracles {

using cx = std::complex<double>;

inline double binary_entropy(double p) {
  double s = 0.0;
  if (p > 0.0) s -= p * std::log2(p);
  if (p < 1.0) s -= (1.0 - p) * std::log2(1.0 - p);
  return s;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Eigen::Matrix2cd pauli(char c) {
  Eigen::Matrix2cd m;
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << cx{0, 0}, cx{0, -1}, cx{0, 1}, cx{0, 0}; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad pauli letter");
  }
  return m;
}

// Partial trace by direct four-index loops over the kept/traced split, with
// bit masks rather than the library's position recomposition.
inline Eigen::MatrixXcd partial_trace_dense(const Eigen::MatrixXcd& rho,
                                            int n_qubits,
                                            unsigned keep_mask) {
  int k = 0;
  std::vector<int> keep_bits, trace_bits;
  for (int q = 0; q < n_qubits; ++q) {
    // q counts from the most significant bit.
    const int bit = n_qubits - 1 - q;
    if (keep_mask & (1u << q)) {
      keep_bits.push_back(bit);
      ++k;
    } else {
      trace_bits.push_back(bit);
    }
  }
  const int t = n_qubits - k;
  const Eigen::Index dk = Eigen::Index{1} << k;
  const Eigen::Index dt = Eigen::Index{1} << t;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      for (Eigen::Index s = 0; s < dt; ++s) {
        Eigen::Index row = 0, col = 0;
        for (int b = 0; b < k; ++b) {
          const Eigen::Index bit = (i >> (k - 1 - b)) & 1;
          row |= bit << keep_bits[b];
          col |= ((j >> (k - 1 - b)) & 1) << keep_bits[b];
        }
        for (int b = 0; b < t; ++b) {
          const Eigen::Index bit = (s >> (t - 1 - b)) & 1;
          row |= bit << trace_bits[b];
          col |= bit << trace_bits[b];
        }
        out(i, j) += rho(row, col);
      }
    }
  }
  return out;
}

// Deterministic Gaussian draws on top of the project RNG.
class Gaussians {
 public:
  explicit Gaussians(std::uint64_t seed) : rng_(seed, 0) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = rng_.uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = rng_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  cx next_complex() { return {next(), next()}; }

 private:
  coqkd::RoundRng rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

inline Eigen::VectorXcd random_state(int dim, std::uint64_t seed) {
  Gaussians g(seed);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = g.next_complex();
  return v / v.norm();
}

inline Eigen::Matrix2cd random_unitary2(std::uint64_t seed) {
  Gaussians g(seed);
  Eigen::Matrix2cd m;
  m << g.next_complex(), g.next_complex(), g.next_complex(), g.next_complex();
  const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
  Eigen::Matrix2cd q = qr.householderQ();
  // Fix the phase convention so the result is deterministic but Haar-like.
  Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) {
    const cx d = r(i, i) / std::abs(r(i, i));
    q.col(i) *= d;
  }
  return q;
}

// Correlation matrix t(a,b) = <sa x sb> from raw amplitudes.
inline Eigen::Matrix3d correlation_from_amps(const Eigen::Vector4cd& psi) {
  Eigen::Matrix3d t;
  const char axes[3] = {'X', 'Y', 'Z'};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Eigen::Matrix2cd sa = pauli(axes[a]);
      const Eigen::Matrix2cd sb = pauli(axes[b]);
      cx sum{0.0, 0.0};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              sum += std::conj(psi(2 * i + j)) * sa(i, k) * sb(j, l) *
                     psi(2 * k + l);
      t(a, b) = sum.real();
    }
  }
  return t;
}

// Numerical CHSH maximization over all dichotomic settings by alternating
// best response: for fixed Bob vectors the optimal Alice vectors are the
// normalized images under T, and vice versa. Restarts guard against flat
// starts; each ascent step is monotone.
inline double max_chsh(const Eigen::Vector4cd& psi, int restarts = 8,
                       int iters = 200, std::uint64_t seed = 12345) {
  const Eigen::Matrix3d t = correlation_from_amps(psi);
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Gaussians g(seed + r);
    Eigen::Vector3d b1, b2;
    for (int i = 0; i < 3; ++i) {
      b1(i) = g.next();
      b2(i) = g.next();
    }
    b1.normalize();
    b2.normalize();
    double value = 0.0;
    for (int it = 0; it < iters; ++it) {
      Eigen::Vector3d a1 = t * (b1 + b2);
      Eigen::Vector3d a2 = t * (b1 - b2);
      if (a1.norm() < 1e-15 || a2.norm() < 1e-15) break;
      a1.normalize();
      a2.normalize();
      Eigen::Vector3d nb1 = t.transpose() * (a1 + a2);
      Eigen::Vector3d nb2 = t.transpose() * (a1 - a2);
      if (nb1.norm() < 1e-15 || nb2.norm() < 1e-15) break;
      b1 = nb1.normalized();
      b2 = nb2.normalized();
      value = (t * (b1 + b2)).norm() + (t * (b1 - b2)).norm();
    }
    best = std::max(best, value);
  }
  return best;
}

// Matched-basis error probability by projector sums: both parties measure in
// basis 0 (kets k0a/k0b per outcome) or basis 1, chosen uniformly; returns
// the probability of differing outcomes conditioned on equal bases.
inline double projector_qber(const Eigen::Vector4cd& psi,
                             const std::array<Eigen::Vector2cd, 2>& basis0,
                             const std::array<Eigen::Vector2cd, 2>& basis1) {
  auto mismatch = [&](const std::array<Eigen::Vector2cd, 2>& b) {
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      cx amp{0.0, 0.0};
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          amp += std::conj(b[i](x)) * std::conj(b[j](y)) * psi(2 * x + y);
      sum += std::norm(amp);
    }
    return sum;
  };
  return 0.5 * (mismatch(basis0) + mismatch(basis1));
}

inline std::array<Eigen::Vector2cd, 2> zbasis() {
  std::array<Eigen::Vector2cd, 2> b;
  b[0] << 1, 0;
  b[1] << 0, 1;
  return b;
}

inline std::array<Eigen::Vector2cd, 2> xbasis() {
  std::array<Eigen::Vector2cd, 2> b;
  const double r = 1.0 / std::sqrt(2.0);
  b[0] << r, r;
  b[1] << -r, r;
  return b;
}

inline std::array<Eigen::Vector2cd, 2> ybasis() {
  std::array<Eigen::Vector2cd, 2> b;
  const double r = 1.0 / std::sqrt(2.0);
  b[0] << cx{r, 0}, cx{0, r};
  b[1] << cx{-r, 0}, cx{0, r};
  return b;
}

// Probability that the product of the three outcomes differs from `sign` when
// the parties measure the given single-qubit bases on an 8-amplitude state.
inline double parity_error(const Eigen::VectorXcd& psi,
                           const std::array<Eigen::Vector2cd, 2>& ba,
                           const std::array<Eigen::Vector2cd, 2>& bb,
                           const std::array<Eigen::Vector2cd, 2>& bc,
                           int sign) {
  double err = 0.0;
  for (int oa = 0; oa < 2; ++oa) {
    for (int ob = 0; ob < 2; ++ob) {
      for (int oc = 0; oc < 2; ++oc) {
        cx amp{0.0, 0.0};
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
              amp += std::conj(ba[oa](x) * bb[ob](y) * bc[oc](z)) *
                     psi(4 * x + 2 * y + z);
        const int prod = (oa ? -1 : 1) * (ob ? -1 : 1) * (oc ? -1 : 1);
        if (prod != sign) err += std::norm(amp);
      }
    }
  }
  return err;
}

}  // namespace oracles
