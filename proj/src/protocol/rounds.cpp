#include "coqkd/protocol/rounds.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "coqkd/qcore/metrics.hpp"
#include "coqkd/rng.hpp"

namespace coqkd::protocol {

namespace {

using qcore::StateVector;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Setting {
  Eigen::Vector2cd plus, minus;
};

Setting setting_from_observable(const qcore::Observable& o) {
  const auto [p, m] = qcore::dichotomic_eigenvectors(o);
  return {p, m};
}

Setting computational_setting() {
  Setting s;
  s.plus << 1, 0;
  s.minus << 0, 1;
  return s;
}

Setting tilted_setting(double n) {
  const auto b = qcore::QubitBasis{cx{n, 0.0}}.basis();
  return {b.kets[0], b.kets[1]};
}

std::array<double, 4> joint_distribution(const StateVector& s,
                                         const Setting& sa,
                                         const Setting& sb) {
  std::array<double, 4> p{};
  const Eigen::Vector2cd* ea[2] = {&sa.plus, &sa.minus};
  const Eigen::Vector2cd* eb[2] = {&sb.plus, &sb.minus};
  for (int oa = 0; oa < 2; ++oa) {
    for (int ob = 0; ob < 2; ++ob) {
      cx amp{0.0, 0.0};
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          amp += std::conj((*ea[oa])(x) * (*eb[ob])(y)) * s.amp(2 * x + y);
        }
      }
      p[oa * 2 + ob] = std::norm(amp);
    }
  }
  return p;
}

struct BranchCtx {
  std::string label = "collapsed";
  double probability = 1.0;
  cx big_n{};
  cx little_n{};
  bool canonical_finite = false;
  double concurrence = 0.0;

  int na = 0, nb = 0;
  std::vector<std::array<double, 4>> dist;
  std::array<std::vector<std::array<double, 4>>, 4> eve_dist;
  std::array<double, 2> eve_plus_prob{};
  std::vector<Disposition> disp;
  std::vector<std::int8_t> key_sign;
  std::vector<std::int8_t> bell_slot;

  double qber_expected = 0.0;
  double sift_expected = 0.0;
  double test_expected = 0.0;
  double chsh_expected = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 4> bell_e{};
};

SecuritySettings settings_for_state(const StateVector& s) {
  const auto& a = s.amplitudes();
  if (std::abs(a(1)) > 1e-9 || std::abs(a(2)) > 1e-9) {
    throw std::domain_error(
        "security mode needs a state in the span of |00> and |11>");
  }
  const cx cross = std::conj(a(0)) * a(3);
  if (std::abs(cross.imag()) > 1e-9) {
    throw std::domain_error("security mode needs a real amplitude ratio");
  }
  return security_settings_from_correlation(2.0 * cross.real());
}

BranchCtx make_branch_ctx(const StateVector& state, const RunOptions& opts) {
  if (state.num_qubits() != 2) {
    throw std::invalid_argument("collapsed state must have two qubits");
  }
  BranchCtx ctx;
  ctx.concurrence = qcore::concurrence(state);
  const auto& a = state.amplitudes();
  if (std::abs(a(1)) < 1e-9 && std::abs(a(2)) < 1e-9) {
    ctx.big_n = a(0);
    if (std::abs(a(0)) > 1e-9) {
      ctx.little_n = a(3) / a(0);
      ctx.canonical_finite = true;
    }
  }

  std::vector<Setting> ma, mb;
  if (opts.mode == RunMode::KeyrateOnly) {
    ma = {computational_setting(), tilted_setting(opts.basis_n)};
    mb = ma;
    ctx.na = ctx.nb = 2;
    ctx.disp.assign(4, Disposition::Discard);
    ctx.key_sign.assign(4, 1);
    ctx.bell_slot.assign(4, -1);
    ctx.disp[0 * 2 + 0] = Disposition::Key;
    ctx.disp[1 * 2 + 1] = Disposition::Key;
    ctx.sift_expected = 0.5;
    ctx.test_expected = 0.0;
  } else {
    const SecuritySettings s = settings_for_state(state);
    ma = {setting_from_observable(s.a1), setting_from_observable(s.a2),
          setting_from_observable(s.a3)};
    mb = {setting_from_observable(s.b1), setting_from_observable(s.b2),
          setting_from_observable(s.b3)};
    ctx.na = ctx.nb = 3;
    ctx.disp.assign(9, Disposition::Discard);
    ctx.key_sign.assign(9, 1);
    ctx.bell_slot.assign(9, -1);
    ctx.disp[1 * 3 + 0] = Disposition::Key;
    ctx.disp[2 * 3 + 1] = Disposition::Key;
    const std::array<std::pair<int, int>, 4> test_pairs = {
        {{0, 0}, {0, 2}, {2, 0}, {2, 2}}};
    for (int k = 0; k < 4; ++k) {
      const int pair = test_pairs[k].first * 3 + test_pairs[k].second;
      ctx.disp[pair] = Disposition::BellTest;
      ctx.bell_slot[pair] = static_cast<std::int8_t>(k);
    }
    ctx.sift_expected = 2.0 / 9.0;
    ctx.test_expected = 4.0 / 9.0;
  }

  auto fill_tables = [&](const StateVector& st,
                         std::vector<std::array<double, 4>>& out) {
    out.resize(ctx.na * ctx.nb);
    for (int i = 0; i < ctx.na; ++i) {
      for (int j = 0; j < ctx.nb; ++j) {
        out[i * ctx.nb + j] = joint_distribution(st, ma[i], mb[j]);
      }
    }
  };
  fill_tables(state, ctx.dist);

  if (opts.adversary.kind == Adversary::Kind::InterceptResend) {
    const char bob = state.qubit_order()[1];
    const Setting eve_settings[2] = {computational_setting(),
                                     tilted_setting(1.0)};
    const qcore::MeasurementBasis eve_bases[2] = {
        qcore::computational_basis(1), qcore::QubitBasis{cx{1.0, 0.0}}.basis()};
    for (int w = 0; w < 2; ++w) {
      const auto branches = qcore::measure(state, eve_bases[w], {bob});
      ctx.eve_plus_prob[w] = branches[0].probability;
      for (int e = 0; e < 2; ++e) {
        if (branches[e].empty_branch) {
          ctx.eve_dist[w * 2 + e] = ctx.dist;  // never sampled
          continue;
        }
        const Eigen::Vector2cd& ket =
            e == 0 ? eve_settings[w].plus : eve_settings[w].minus;
        Eigen::VectorXcd kv(2);
        kv << ket(0), ket(1);
        const StateVector forwarded = qcore::tensor(
            branches[e].state, StateVector(kv, {bob}));
        fill_tables(forwarded, ctx.eve_dist[w * 2 + e]);
      }
    }
  }

  // Honest expectations for the report and the supervision gates.
  if (opts.mode == RunMode::KeyrateOnly) {
    const auto& d0 = ctx.dist[0];
    const auto& d1 = ctx.dist[3];
    ctx.qber_expected = 0.5 * (d0[1] + d0[2] + d1[1] + d1[2]);
  } else {
    double q = 0.0;
    for (const int pair : {1 * 3 + 0, 2 * 3 + 1}) {
      const auto& d = ctx.dist[pair];
      const double e = d[0] - d[1] - d[2] + d[3];
      ctx.key_sign[pair] = e >= 0.0 ? 1 : -1;
      q += e >= 0.0 ? d[1] + d[2] : d[0] + d[3];
    }
    ctx.qber_expected = 0.5 * q;
    const std::array<int, 4> pairs = {0 * 3 + 0, 0 * 3 + 2, 2 * 3 + 0,
                                      2 * 3 + 2};
    for (int k = 0; k < 4; ++k) {
      const auto& d = ctx.dist[pairs[k]];
      ctx.bell_e[k] = d[0] - d[1] - d[2] + d[3];
    }
    ctx.chsh_expected =
        ctx.bell_e[0] + ctx.bell_e[1] + ctx.bell_e[2] - ctx.bell_e[3];
  }
  return ctx;
}

struct Tally {
  std::array<long, 2> rounds{}, key{}, key_err{}, test{}, discard{};
  std::array<long, 8> bell_count{}, bell_corr{};

  Tally& operator+=(const Tally& o) {
    for (int b = 0; b < 2; ++b) {
      rounds[b] += o.rounds[b];
      key[b] += o.key[b];
      key_err[b] += o.key_err[b];
      test[b] += o.test[b];
      discard[b] += o.discard[b];
    }
    for (int k = 0; k < 8; ++k) {
      bell_count[k] += o.bell_count[k];
      bell_corr[k] += o.bell_corr[k];
    }
    return *this;
  }
};

struct Kernel {
  const std::vector<BranchCtx>* branches = nullptr;
  const RunOptions* opts = nullptr;
  SiftingRecord* record = nullptr;
  MessageLog* log = nullptr;  // serial runs only
  std::vector<ControllerChoice>* controller_record = nullptr;
  double controller_basis_n = 0.0;

  void operator()(long i, Tally& t) const {
    RoundRng rng(opts->seed, static_cast<std::uint64_t>(i));
    int br = 0;
    if (branches->size() == 2) {
      br = rng.uniform() < (*branches)[0].probability ? 0 : 1;
      if (controller_record) {
        (*controller_record)[i] =
            ControllerChoice{'C', cx{controller_basis_n, 0.0},
                             (*branches)[br].label};
      }
    }
    const BranchCtx& ctx = (*branches)[br];
    const int sa = rng.pick(ctx.na);
    const int sb = rng.pick(ctx.nb);
    const int pair = sa * ctx.nb + sb;
    const std::array<double, 4>* d = &ctx.dist[pair];
    if (opts->adversary.kind == Adversary::Kind::InterceptResend &&
        rng.uniform() < opts->adversary.rate) {
      const int w = rng.pick(2);
      const int e = rng.uniform() < ctx.eve_plus_prob[w] ? 0 : 1;
      d = &ctx.eve_dist[w * 2 + e][pair];
    }
    const double u = rng.uniform();
    int o = 0;
    double acc = 0.0;
    for (; o < 3; ++o) {
      acc += (*d)[o];
      if (u < acc) break;
    }
    const int aa = (o >> 1) ? -1 : 1;
    const int bb = (o & 1) ? -1 : 1;
    int bob_announced = bb;
    if (opts->adversary.kind == Adversary::Kind::FlipAnnouncements &&
        rng.uniform() < opts->adversary.rate) {
      bob_announced = -bb;
    }

    t.rounds[br]++;
    const Disposition disp = ctx.disp[pair];
    if (disp == Disposition::Key) {
      t.key[br]++;
      const bool err = opts->mode == RunMode::KeyrateOnly
                           ? aa != bob_announced
                           : aa * bob_announced != ctx.key_sign[pair];
      if (err) t.key_err[br]++;
    } else if (disp == Disposition::BellTest) {
      const int slot = ctx.bell_slot[pair];
      t.test[br]++;
      t.bell_count[br * 4 + slot]++;
      t.bell_corr[br * 4 + slot] += aa * bob_announced;
    } else {
      t.discard[br]++;
    }

    if (record) {
      record->rows[i] =
          RoundRow{static_cast<std::uint8_t>(sa), static_cast<std::uint8_t>(sb),
                   static_cast<std::int8_t>(aa),
                   static_cast<std::int8_t>(bob_announced), disp};
    }
    if (log) {
      log->push_back({i, 'C', std::string("outcome ") + ctx.label});
      log->push_back({i, 'A', "basis " + std::to_string(sa)});
      log->push_back({i, 'B', "basis " + std::to_string(sb)});
    }
  }
};

// Serial reference loop, kept alongside the parallel kernel for testing.
Tally run_serial(const Kernel& k, long rounds) {
  Tally t{};
  for (long i = 0; i < rounds; ++i) k(i, t);
  return t;
}

#ifdef _OPENMP
#pragma omp declare reduction(tally_sum : Tally : omp_out += omp_in) \
    initializer(omp_priv = Tally{})
#endif

Tally run_parallel(const Kernel& k, long rounds) {
#ifdef _OPENMP
  Tally t{};
#pragma omp parallel for schedule(static) reduction(tally_sum : t)
  for (long i = 0; i < rounds; ++i) k(i, t);
  return t;
#else
  return run_serial(k, rounds);
#endif
}

Verdict gate_verdict(const ProtocolReport& r) {
  if (r.state_concurrence < 1e-6) return Verdict::NoKeyPossible;
  if (r.rounds <= 0 || r.key_count <= 0) return Verdict::CheatSuspected;
  const double f = r.sifted_rate_expected;
  const double sigma_f = std::sqrt(f * (1.0 - f) / r.rounds);
  if (std::abs(r.sifted_rate - f) > 3.0 * sigma_f) {
    return Verdict::CheatSuspected;
  }
  const double q = r.qber_analytic;
  if (q < 1e-12) {
    if (r.key_errors != 0) return Verdict::CheatSuspected;
  } else {
    const double sigma_q = std::sqrt(q * (1.0 - q) / r.key_count);
    if (std::abs(r.qber_mc - q) > 3.0 * sigma_q) {
      return Verdict::CheatSuspected;
    }
  }
  if (r.mode == RunMode::WithSecurity) {
    double var = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (r.bell_pairs[k].count == 0) return Verdict::CheatSuspected;
      const double e = r.bell_e_expected[k];
      var += (1.0 - e * e) / r.bell_pairs[k].count;
    }
    if (std::abs(r.chsh_mc - r.chsh_expected) > 3.0 * std::sqrt(var)) {
      return Verdict::CheatSuspected;
    }
  }
  return Verdict::Clean;
}

ProtocolReport assemble(const BranchCtx& ctx, const RunOptions& opts,
                        const Tally& t, int br) {
  ProtocolReport r;
  r.mode = opts.mode;
  r.branch_label = ctx.label;
  r.branch_probability = ctx.probability;
  r.big_n = ctx.big_n;
  r.little_n = ctx.little_n;
  r.canonical_finite = ctx.canonical_finite;
  r.state_concurrence = ctx.concurrence;
  r.rounds = t.rounds[br];
  r.key_count = t.key[br];
  r.key_errors = t.key_err[br];
  r.test_count = t.test[br];
  r.discard_count = t.discard[br];
  r.qber_analytic = ctx.qber_expected;
  r.qber_mc = r.key_count > 0
                  ? static_cast<double>(r.key_errors) / r.key_count
                  : 0.0;
  r.sifted_rate_expected = ctx.sift_expected;
  r.sifted_rate =
      r.rounds > 0 ? static_cast<double>(r.key_count) / r.rounds : 0.0;
  r.relative_rate = relative_key_rate(std::min(r.qber_mc, 0.5));
  r.chsh_expected = ctx.chsh_expected;
  r.bell_e_expected = ctx.bell_e;
  if (opts.mode == RunMode::WithSecurity) {
    double s = 0.0;
    const double signs[4] = {1.0, 1.0, 1.0, -1.0};
    for (int k = 0; k < 4; ++k) {
      r.bell_pairs[k].count = t.bell_count[br * 4 + k];
      r.bell_pairs[k].corr = t.bell_corr[br * 4 + k];
      const double e = r.bell_pairs[k].count > 0
                           ? static_cast<double>(r.bell_pairs[k].corr) /
                                 r.bell_pairs[k].count
                           : 0.0;
      s += signs[k] * e;
    }
    r.chsh_mc = s;
  }
  r.verdict = gate_verdict(r);
  return r;
}

}  // namespace

const char* to_string(RunMode m) {
  return m == RunMode::KeyrateOnly ? "keyrate" : "security";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Clean: return "CLEAN";
    case Verdict::CheatSuspected: return "CHEAT_SUSPECTED";
    case Verdict::NoKeyPossible: return "NO_KEY_POSSIBLE";
  }
  return "?";
}

ProtocolReport run_rounds(const qcore::StateVector& collapsed,
                          const RunOptions& opts, SiftingRecord* record) {
  if (opts.rounds < 1) {
    throw std::invalid_argument("rounds must be >= 1");
  }
  std::vector<BranchCtx> branches(1);
  branches[0] = make_branch_ctx(collapsed, opts);
  if (record) record->rows.assign(opts.rounds, RoundRow{});
  Kernel k{&branches, &opts, record, nullptr};
  const Tally t =
      opts.parallel ? run_parallel(k, opts.rounds) : run_serial(k, opts.rounds);
  return assemble(branches[0], opts, t, 0);
}

FullRunReport run_protocol(double p, double n, const RunOptions& opts,
                           MessageLog* log,
                           std::vector<ControllerChoice>* controller_record) {
  if (opts.rounds < 1) {
    throw std::invalid_argument("rounds must be >= 1");
  }
  RunOptions branch_opts = opts;
  const auto collapsed = collapse_three(p, cx{n, 0.0});
  std::vector<BranchCtx> branches(2);
  for (int b = 0; b < 2; ++b) {
    branches[b] = make_branch_ctx(collapsed[b].state, branch_opts);
    branches[b].label = collapsed[b].outcome;
    branches[b].probability = collapsed[b].probability;
    branches[b].big_n = collapsed[b].big_n;
    branches[b].little_n = collapsed[b].little_n;
    branches[b].canonical_finite = collapsed[b].canonical_finite;
  }
  if (log) {
    log->push_back({-1, 'C', "announce basis n=" + fmt(n)});
  }
  if (controller_record) {
    controller_record->assign(branch_opts.rounds, ControllerChoice{});
  }
  Kernel k{&branches, &branch_opts, nullptr, log, controller_record, n};
  // Logging needs the rounds in order, so it runs on the serial path.
  const Tally t = (branch_opts.parallel && !log)
                      ? run_parallel(k, branch_opts.rounds)
                      : run_serial(k, branch_opts.rounds);
  FullRunReport full;
  full.rounds = branch_opts.rounds;
  full.plus_branch = assemble(branches[0], branch_opts, t, 0);
  full.minus_branch = assemble(branches[1], branch_opts, t, 1);
  full.qber_weighted_analytic =
      branches[0].probability * branches[0].qber_expected +
      branches[1].probability * branches[1].qber_expected;
  const long key = full.plus_branch.key_count + full.minus_branch.key_count;
  const long err = full.plus_branch.key_errors + full.minus_branch.key_errors;
  full.qber_weighted_mc = key > 0 ? static_cast<double>(err) / key : 0.0;
  if (log) {
    log->push_back({-1, 'A', "report qber=" + fmt(full.qber_weighted_mc)});
    log->push_back({-1, 'B', "report qber=" + fmt(full.qber_weighted_mc)});
  }
  return full;
}

Verdict supervise(const ProtocolReport& report, double p, double n) {
  const auto collapsed = collapse_three(p, cx{n, 0.0});
  int bi = -1;
  if (report.branch_label == "+") bi = 0;
  if (report.branch_label == "-") bi = 1;
  if (bi < 0) {
    throw std::invalid_argument("supervise expects a +/- branch report");
  }
  if (qcore::concurrence(collapsed[bi].state) < 1e-6) {
    return Verdict::NoKeyPossible;
  }
  RunOptions opts;
  opts.mode = report.mode;
  const BranchCtx ctx = make_branch_ctx(collapsed[bi].state, opts);
  ProtocolReport checked = report;
  checked.state_concurrence = ctx.concurrence;
  checked.qber_analytic = ctx.qber_expected;
  checked.sifted_rate_expected = ctx.sift_expected;
  checked.chsh_expected = ctx.chsh_expected;
  checked.bell_e_expected = ctx.bell_e;
  return gate_verdict(checked);
}

std::string ProtocolReport::csv_header() {
  return "mode,branch,branch_prob,concurrence,rounds,key_count,key_errors,"
         "test_count,discard_count,qber_analytic,qber_mc,sifted_rate_expected,"
         "sifted_rate,relative_rate,chsh_expected,chsh_mc,verdict";
}

std::string ProtocolReport::csv_row() const {
  std::ostringstream out;
  out << to_string(mode) << ',' << branch_label << ','
      << fmt(branch_probability) << ',' << fmt(state_concurrence) << ','
      << rounds << ',' << key_count << ',' << key_errors << ',' << test_count
      << ',' << discard_count << ',' << fmt(qber_analytic) << ','
      << fmt(qber_mc) << ',' << fmt(sifted_rate_expected) << ','
      << fmt(sifted_rate) << ',' << fmt(relative_rate) << ','
      << fmt(chsh_expected) << ',' << fmt(chsh_mc) << ','
      << to_string(verdict);
  return out.str();
}

std::string ProtocolReport::summary() const {
  std::ostringstream out;
  out << "branch " << branch_label << " (p=" << fmt(branch_probability)
      << ", C=" << fmt(state_concurrence) << ")\n"
      << "  rounds " << rounds << ": key " << key_count << ", test "
      << test_count << ", discarded " << discard_count << "\n"
      << "  qber " << fmt(qber_mc) << " (expected " << fmt(qber_analytic)
      << "), sifted rate " << fmt(sifted_rate) << " (expected "
      << fmt(sifted_rate_expected) << "), relative rate "
      << fmt(relative_rate) << "\n";
  if (mode == RunMode::WithSecurity) {
    out << "  chsh " << fmt(chsh_mc) << " (expected " << fmt(chsh_expected)
        << ")\n";
  }
  out << "  verdict " << to_string(verdict);
  return out.str();
}

}  // namespace coqkd::protocol
