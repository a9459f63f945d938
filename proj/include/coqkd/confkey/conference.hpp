#pragma once

#include <array>
#include <string>
#include <vector>

#include "coqkd/protocol/rounds.hpp"

namespace coqkd::confkey {

using qcore::cx;

/// Signed three-qubit Pauli word; the signed operator fixes the three-party
/// resource at weight 1/2, so the expectation of the word equals the sign.
struct StabilizerElement {
  int sign = 1;
  std::array<char, 3> word = {'I', 'I', 'I'};

  std::string describe() const;
};

/// The eight-element stabilizer group of the shared state at p = 1/2,
/// verified element-wise and closed under multiplication.
const std::array<StabilizerElement, 8>& stabilizer_group();

/// Product of two signed Pauli words; throws if the result picks up an
/// imaginary phase (cannot happen inside a stabilizer group).
StabilizerElement multiply(const StabilizerElement& a,
                           const StabilizerElement& b);

/// Outcome chart of one kept setting combination: the four outcome triples
/// that occur with nonzero probability on the p = 1/2 resource.
struct CorrelationTable {
  std::array<char, 3> settings = {'X', 'X', 'X'};
  std::array<std::array<int, 3>, 4> rows{};  // entries are +1 / -1
};

/// Charts for XXX, XYY, YXY, YYX, derived from the state's outcome
/// probabilities rather than written down by hand.
std::array<CorrelationTable, 4> correlation_tables();

/// sqrt(p)|+x>|phi+> + sqrt(1-p)|-x>|phi->, labels (A, B, C). Equals the
/// three-qubit resource up to relabeling; at p = 1/2 it is the |000>+|111>
/// state exactly.
qcore::StateVector conference_state(double p);

struct CombinationQber {
  double xxx = 0.0, xyy = 0.0, yxy = 0.0, yyx = 0.0;
  double overall_sifted = 0.0;  // uniform average over the four kept combos
};

/// Per-combination parity error rates: zero for XXX and XYY, and
/// (sqrt(1-p) - sqrt(p))^2 / 2 for the other two.
CombinationQber conference_qber_analytic(double p);

/// Three-party Bell expression A1(B1+B2) + A2(B1-B2)C1 evaluated with the
/// menu A1=Z, A2=X, B1 = cos(t)Z + sin(t)X, B2 = cos(t)Z - sin(t)X, C1=X;
/// equals 4 sqrt(p(1-p)) cos(t) + 2 sin(t).
double bell_I(double p, double theta);

/// Maximum of bell_I over theta: 2 sqrt(1 + 4p(1-p)); above 2 on (0,1).
double optimal_violation(double p);

/// The maximizing angle, sin(theta) = 1/sqrt(1 + 4p(1-p)).
double optimal_theta(double p);

struct ConferenceOptions {
  long rounds = 100000;
  std::uint64_t seed = 1;
  bool secure = false;  // adds the z/theta settings and the Bell estimate
  protocol::Adversary adversary{};
  bool parallel = true;
};

struct ConferenceRound {
  std::uint8_t settings[3] = {0, 0, 0};
  std::int8_t outcomes[3] = {0, 0, 0};  // 0 marks the identity setting
  protocol::Disposition disposition = protocol::Disposition::Discard;
};

struct ConferenceReport {
  double p = 0.5;
  bool secure = false;
  long rounds = 0;
  long key_count = 0, test_count = 0, discard_count = 0;
  std::array<long, 4> combo_counts{};  // xxx, xyy, yxy, yyx
  std::array<long, 4> combo_errors{};
  double qber_xxx = 0.0, qber_xyy = 0.0, qber_yxy = 0.0, qber_yyx = 0.0;
  double qber_overall = 0.0;
  CombinationQber analytic{};
  double key_rate_expected = 0.0, key_rate = 0.0;
  double bell_expected = 0.0, bell_mc = 0.0;
  std::array<protocol::PairTally, 4> bell_combos{};
  std::array<double, 4> bell_e_expected{};
  protocol::Verdict verdict = protocol::Verdict::Clean;

  static std::string csv_header();
  std::string csv_row() const;
  std::string summary() const;
};

/// Conference key generation on the weighted resource. Non-secure mode: every
/// party draws from {X, Y} and the four stabilizer combinations are kept
/// (rate 1/2). Secure mode: menus of 3 x 4 x 3 settings; four combinations
/// make the key (rate 1/9), four estimate the Bell expression, the remaining
/// 28 are discarded.
ConferenceReport run_conference(double p, const ConferenceOptions& opts,
                                std::vector<ConferenceRound>* record = nullptr);

}  // namespace coqkd::confkey
