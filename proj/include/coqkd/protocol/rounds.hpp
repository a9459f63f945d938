#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "coqkd/protocol/collapse.hpp"

namespace coqkd::protocol {

enum class RunMode {
  KeyrateOnly,    // two bases per party: computational and |+-_n>
  WithSecurity,   // three settings per party with embedded CHSH test
};

enum class Disposition : std::uint8_t { Key, BellTest, Discard };

enum class Verdict { Clean, CheatSuspected, NoKeyPossible };

const char* to_string(RunMode m);
const char* to_string(Verdict v);

/// Toy adversaries used to exercise supervision. FlipAnnouncements makes Bob
/// misreport a fraction of his announced outcomes; InterceptResend measures
/// Bob's flying qubit in a random Z/X basis and forwards the eigenstate.
struct Adversary {
  enum class Kind { None, FlipAnnouncements, InterceptResend };
  Kind kind = Kind::None;
  double rate = 0.0;
};

struct RunOptions {
  RunMode mode = RunMode::KeyrateOnly;
  long rounds = 100000;
  std::uint64_t seed = 1;
  /// Parameter of the second sifting basis in keyrate mode. The protocol
  /// fixes it at 1 (the x basis); the closed-form error rate refers to that
  /// choice.
  double basis_n = 1.0;
  Adversary adversary{};
  bool parallel = true;
};

struct RoundRow {
  std::uint8_t alice_setting = 0;
  std::uint8_t bob_setting = 0;
  std::int8_t alice_outcome = 0;  // +1 / -1 as announced
  std::int8_t bob_outcome = 0;
  Disposition disposition = Disposition::Discard;
};

struct SiftingRecord {
  std::vector<RoundRow> rows;
};

struct PairTally {
  long count = 0;
  long corr = 0;  // running sum of alice*bob outcomes
};

struct ProtocolReport {
  RunMode mode = RunMode::KeyrateOnly;
  std::string branch_label = "collapsed";
  double branch_probability = 1.0;
  cx big_n{};
  cx little_n{};
  bool canonical_finite = false;
  double state_concurrence = 0.0;

  long rounds = 0;
  long key_count = 0;
  long key_errors = 0;
  long test_count = 0;
  long discard_count = 0;

  double qber_analytic = 0.0;
  double qber_mc = 0.0;
  double sifted_rate_expected = 0.0;
  double sifted_rate = 0.0;
  double relative_rate = 0.0;
  double chsh_expected = std::numeric_limits<double>::quiet_NaN();
  double chsh_mc = std::numeric_limits<double>::quiet_NaN();
  std::array<PairTally, 4> bell_pairs{};
  std::array<double, 4> bell_e_expected{};
  Verdict verdict = Verdict::Clean;

  // Extras filled by the four-qubit protocol.
  double q_formula = 0.0;
  double q_oracle = 0.0;
  bool q_formula_agrees = true;
  double controller_outcome_probability = 1.0;

  static std::string csv_header();
  std::string csv_row() const;
  std::string summary() const;
};

/// Ordered public-announcement log; "round" is -1 for protocol-level entries.
struct Message {
  long round = -1;
  char party = '?';
  std::string text;
};
using MessageLog = std::vector<Message>;

/// One controller announcement: who measured, in which basis, and the
/// outcome label ("+" or "-" for the one-parameter basis).
struct ControllerChoice {
  char party = 'C';
  cx basis_n{};
  std::string announced;
};

/// Runs sifting rounds on a fixed collapsed two-qubit state. Keyrate mode
/// accepts any state; security mode requires a state in the span of
/// {|00>, |11>} with a real amplitude ratio (the menu is tuned to it).
ProtocolReport run_rounds(const qcore::StateVector& collapsed,
                          const RunOptions& opts,
                          SiftingRecord* record = nullptr);

struct FullRunReport {
  ProtocolReport plus_branch;
  ProtocolReport minus_branch;
  long rounds = 0;
  double qber_weighted_analytic = 0.0;
  double qber_weighted_mc = 0.0;
};

/// Full protocol: the controller measures its qubit of the Nmm(p) resource in
/// the basis with (real) parameter n each round and announces the outcome;
/// the remaining parties run the configured sifting mode on their pair.
/// `controller_record` (optional) collects one announcement per round.
FullRunReport run_protocol(double p, double n, const RunOptions& opts,
                           MessageLog* log = nullptr,
                           std::vector<ControllerChoice>* controller_record =
                               nullptr);

/// Controller-side check of a reported run against the analytic expectations
/// for resource weight p and announced basis n. NoKeyPossible when the branch
/// carries no entanglement; CheatSuspected when any reported statistic sits
/// outside its three-sigma gate.
Verdict supervise(const ProtocolReport& report, double p, double n);

}  // namespace coqkd::protocol
