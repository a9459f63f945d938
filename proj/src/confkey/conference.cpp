#include "coqkd/confkey/conference.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "coqkd/rng.hpp"

namespace coqkd::confkey {

namespace {

using protocol::Adversary;
using protocol::Disposition;
using protocol::Verdict;
using qcore::StateVector;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int pauli_index(char c) {
  switch (c) {
    case 'I': return 0;
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
  }
  throw std::invalid_argument("unknown Pauli letter");
}

const char kPauliNames[4] = {'I', 'X', 'Y', 'Z'};

// Single-qubit products: result letter and phase as a power of i.
void pauli_mul(char a, char b, char& out, int& phase_i) {
  static const int kProduct[4][4] = {
      {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int kPhase[4][4] = {
      {0, 0, 0, 0}, {0, 0, 1, 3}, {0, 3, 0, 1}, {0, 1, 3, 0}};
  const int ia = pauli_index(a), ib = pauli_index(b);
  out = kPauliNames[kProduct[ia][ib]];
  phase_i = kPhase[ia][ib];
}

qcore::Observable pauli_observable(char c) {
  switch (c) {
    case 'I': return qcore::identity_obs();
    case 'X': return qcore::sigma_x();
    case 'Y': return qcore::sigma_y();
    case 'Z': return qcore::sigma_z();
  }
  throw std::invalid_argument("unknown Pauli letter");
}

double word_expectation(const StateVector& s, const StabilizerElement& e) {
  std::vector<std::pair<char, qcore::Observable>> per_party;
  for (int q = 0; q < 3; ++q) {
    if (e.word[q] == 'I') continue;
    per_party.emplace_back(s.qubit_order()[q], pauli_observable(e.word[q]));
  }
  return qcore::expectation(s, per_party);
}

}  // namespace

std::string StabilizerElement::describe() const {
  std::string out = sign < 0 ? "-" : "+";
  out.append(word.begin(), word.end());
  return out;
}

StabilizerElement multiply(const StabilizerElement& a,
                           const StabilizerElement& b) {
  StabilizerElement r;
  int phase = 0;
  for (int q = 0; q < 3; ++q) {
    int p = 0;
    pauli_mul(a.word[q], b.word[q], r.word[q], p);
    phase = (phase + p) % 4;
  }
  if (phase % 2 != 0) {
    throw std::logic_error("word product has an imaginary phase");
  }
  r.sign = a.sign * b.sign * (phase == 0 ? 1 : -1);
  return r;
}

const std::array<StabilizerElement, 8>& stabilizer_group() {
  static const std::array<StabilizerElement, 8> group = [] {
    std::array<StabilizerElement, 8> g = {{
        {+1, {'I', 'I', 'I'}},
        {+1, {'X', 'X', 'X'}},
        {+1, {'Z', 'Z', 'I'}},
        {+1, {'I', 'Z', 'Z'}},
        {+1, {'Z', 'I', 'Z'}},
        {-1, {'X', 'Y', 'Y'}},
        {-1, {'Y', 'X', 'Y'}},
        {-1, {'Y', 'Y', 'X'}},
    }};
    const StateVector ghz = conference_state(0.5);
    for (const auto& e : group) {
      if (std::abs(word_expectation(ghz, e) - e.sign) > qcore::kTolExact) {
        throw std::logic_error("stabilizer element fails on the shared state");
      }
    }
    for (const auto& a : g) {
      for (const auto& b : g) {
        const StabilizerElement p = multiply(a, b);
        bool found = false;
        for (const auto& c : g) {
          if (c.sign == p.sign && c.word == p.word) found = true;
        }
        if (!found) throw std::logic_error("stabilizer set is not closed");
      }
    }
    return g;
  }();
  return group;
}

qcore::StateVector conference_state(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("conference_state requires p in (0,1]");
  }
  const double s = std::sqrt(p);
  const double t = std::sqrt(1.0 - p);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(8);
  a(0) = 0.5 * (s + t);
  a(3) = 0.5 * (s - t);
  a(4) = 0.5 * (s - t);
  a(7) = 0.5 * (s + t);
  return StateVector(std::move(a), {'A', 'B', 'C'});
}

namespace {

struct TripleSetting {
  Eigen::Vector2cd plus, minus;
  bool identity = false;
};

TripleSetting setting_from(const qcore::Observable& o) {
  TripleSetting s;
  if (o.label == "I") {
    s.identity = true;
    s.plus << 1, 0;
    s.minus << 0, 1;
    return s;
  }
  const auto [p, m] = qcore::dichotomic_eigenvectors(o);
  s.plus = p;
  s.minus = m;
  return s;
}

// Joint outcome probabilities for a setting triple; identity settings are
// summed out and report a null outcome.
std::array<double, 8> triple_distribution(const StateVector& st,
                                          const TripleSetting& sa,
                                          const TripleSetting& sb,
                                          const TripleSetting& sc) {
  std::array<double, 8> p{};
  for (int oa = 0; oa < 2; ++oa) {
    for (int ob = 0; ob < 2; ++ob) {
      for (int oc = 0; oc < 2; ++oc) {
        cx amp{0.0, 0.0};
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) {
            for (int z = 0; z < 2; ++z) {
              const cx wa = oa == 0 ? sa.plus(x) : sa.minus(x);
              const cx wb = ob == 0 ? sb.plus(y) : sb.minus(y);
              const cx wc = oc == 0 ? sc.plus(z) : sc.minus(z);
              amp += std::conj(wa * wb * wc) * st.amp(4 * x + 2 * y + z);
            }
          }
        }
        p[4 * oa + 2 * ob + oc] += std::norm(amp);
      }
    }
  }
  if (sc.identity) {
    // Collapse the Charlie index: the outcome is null for identity settings.
    std::array<double, 8> q{};
    for (int oa = 0; oa < 2; ++oa) {
      for (int ob = 0; ob < 2; ++ob) {
        q[4 * oa + 2 * ob] = p[4 * oa + 2 * ob] + p[4 * oa + 2 * ob + 1];
      }
    }
    return q;
  }
  return p;
}

struct ComboInfo {
  Disposition disp = Disposition::Discard;
  int combo_id = -1;   // 0=xxx 1=xyy 2=yxy 3=yyx for key combos
  int bell_slot = -1;  // 0..3 for test combos
  int parity_sign = 1;
};

struct ConferenceCtx {
  int na = 0, nb = 0, nc = 0;
  std::vector<std::array<double, 8>> dist;
  std::array<std::vector<std::array<double, 8>>, 4> eve_dist;
  std::array<double, 2> eve_plus_prob{};
  std::vector<ComboInfo> combos;
  std::vector<bool> c_identity;
  std::array<double, 4> combo_qber_expected{};
  std::array<double, 4> bell_e{};
  double bell_expected = 0.0;
  double key_rate_expected = 0.0;
};

ConferenceCtx make_conference_ctx(double p, const ConferenceOptions& opts) {
  const StateVector st = conference_state(p);
  ConferenceCtx ctx;
  std::vector<TripleSetting> ma, mb, mc;
  const TripleSetting x = setting_from(qcore::sigma_x());
  const TripleSetting y = setting_from(qcore::sigma_y());
  if (opts.secure) {
    const double theta = optimal_theta(p);
    const TripleSetting b3 =
        setting_from(qcore::pauli_combo(std::sin(theta), 0.0, std::cos(theta)));
    const TripleSetting b4 = setting_from(
        qcore::pauli_combo(-std::sin(theta), 0.0, std::cos(theta)));
    ma = {x, y, setting_from(qcore::sigma_z())};
    mb = {x, y, b3, b4};
    mc = {x, y, setting_from(qcore::identity_obs())};
  } else {
    ma = {x, y};
    mb = {x, y};
    mc = {x, y};
  }
  ctx.na = static_cast<int>(ma.size());
  ctx.nb = static_cast<int>(mb.size());
  ctx.nc = static_cast<int>(mc.size());

  const int total = ctx.na * ctx.nb * ctx.nc;
  ctx.combos.assign(total, ComboInfo{});
  ctx.c_identity.assign(total, false);
  auto at = [&](int a, int b, int c) { return (a * ctx.nb + b) * ctx.nc + c; };

  // Key combinations and their expected outcome parity: all-x is correlated,
  // the two-y combinations are anti-correlated.
  const struct {
    int a, b, c, id, sign;
  } keys[4] = {{0, 0, 0, 0, +1},
               {0, 1, 1, 1, -1},
               {1, 0, 1, 2, -1},
               {1, 1, 0, 3, -1}};
  for (const auto& k : keys) {
    ComboInfo& info = ctx.combos[at(k.a, k.b, k.c)];
    info.disp = Disposition::Key;
    info.combo_id = k.id;
    info.parity_sign = k.sign;
  }
  if (opts.secure) {
    const struct {
      int a, b, c, slot;
    } tests[4] = {{2, 2, 2, 0}, {2, 3, 2, 1}, {0, 2, 0, 2}, {0, 3, 0, 3}};
    for (const auto& t : tests) {
      ComboInfo& info = ctx.combos[at(t.a, t.b, t.c)];
      info.disp = Disposition::BellTest;
      info.bell_slot = t.slot;
    }
  }
  ctx.key_rate_expected = 4.0 / total;

  auto fill = [&](const StateVector& state,
                  std::vector<std::array<double, 8>>& out) {
    out.resize(total);
    for (int a = 0; a < ctx.na; ++a) {
      for (int b = 0; b < ctx.nb; ++b) {
        for (int c = 0; c < ctx.nc; ++c) {
          out[at(a, b, c)] = triple_distribution(state, ma[a], mb[b], mc[c]);
        }
      }
    }
  };
  fill(st, ctx.dist);
  for (int a = 0; a < ctx.na; ++a) {
    for (int b = 0; b < ctx.nb; ++b) {
      for (int c = 0; c < ctx.nc; ++c) {
        ctx.c_identity[at(a, b, c)] = mc[c].identity;
      }
    }
  }

  if (opts.adversary.kind == Adversary::Kind::InterceptResend) {
    // The eavesdropper grabs Charlie's qubit and measures X or Y.
    const qcore::MeasurementBasis eve_bases[2] = {
        qcore::QubitBasis{cx{1.0, 0.0}}.basis(),
        qcore::QubitBasis{cx{0.0, 1.0}}.basis()};
    for (int w = 0; w < 2; ++w) {
      const auto branches = qcore::measure(st, eve_bases[w], {'C'});
      ctx.eve_plus_prob[w] = branches[0].probability;
      for (int e = 0; e < 2; ++e) {
        if (branches[e].empty_branch) {
          ctx.eve_dist[w * 2 + e] = ctx.dist;
          continue;
        }
        Eigen::VectorXcd kv = eve_bases[w].kets[e];
        const StateVector forwarded =
            qcore::tensor(branches[e].state, StateVector(kv, {'C'}));
        fill(forwarded, ctx.eve_dist[w * 2 + e]);
      }
    }
  }

  // Exact expectations from the honest tables.
  for (const auto& k : keys) {
    const auto& d = ctx.dist[at(k.a, k.b, k.c)];
    double err = 0.0;
    for (int o = 0; o < 8; ++o) {
      const int prod =
          ((o >> 2) & 1 ? -1 : 1) * ((o >> 1) & 1 ? -1 : 1) * (o & 1 ? -1 : 1);
      if (prod != k.sign) err += d[o];
    }
    ctx.combo_qber_expected[k.id] = err;
  }
  if (opts.secure) {
    const struct {
      int a, b, c, slot;
    } tests[4] = {{2, 2, 2, 0}, {2, 3, 2, 1}, {0, 2, 0, 2}, {0, 3, 0, 3}};
    for (const auto& t : tests) {
      const auto& d = ctx.dist[at(t.a, t.b, t.c)];
      const bool ident = ctx.c_identity[at(t.a, t.b, t.c)];
      double e = 0.0;
      for (int o = 0; o < 8; ++o) {
        int prod = ((o >> 2) & 1 ? -1 : 1) * ((o >> 1) & 1 ? -1 : 1);
        if (!ident) prod *= (o & 1) ? -1 : 1;
        e += prod * d[o];
      }
      ctx.bell_e[t.slot] = e;
    }
    ctx.bell_expected =
        ctx.bell_e[0] + ctx.bell_e[1] + ctx.bell_e[2] - ctx.bell_e[3];
  }
  return ctx;
}

struct ConfTally {
  long key = 0, test = 0, discard = 0;
  std::array<long, 4> combo_count{}, combo_err{};
  std::array<long, 4> bell_count{}, bell_corr{};

  ConfTally& operator+=(const ConfTally& o) {
    key += o.key;
    test += o.test;
    discard += o.discard;
    for (int i = 0; i < 4; ++i) {
      combo_count[i] += o.combo_count[i];
      combo_err[i] += o.combo_err[i];
      bell_count[i] += o.bell_count[i];
      bell_corr[i] += o.bell_corr[i];
    }
    return *this;
  }
};

struct ConfKernel {
  const ConferenceCtx* ctx = nullptr;
  const ConferenceOptions* opts = nullptr;
  std::vector<ConferenceRound>* record = nullptr;

  void operator()(long i, ConfTally& t) const {
    RoundRng rng(opts->seed, static_cast<std::uint64_t>(i));
    const int sa = rng.pick(ctx->na);
    const int sb = rng.pick(ctx->nb);
    const int sc = rng.pick(ctx->nc);
    const int combo = (sa * ctx->nb + sb) * ctx->nc + sc;
    const std::array<double, 8>* d = &ctx->dist[combo];
    if (opts->adversary.kind == Adversary::Kind::InterceptResend &&
        rng.uniform() < opts->adversary.rate) {
      const int w = rng.pick(2);
      const int e = rng.uniform() < ctx->eve_plus_prob[w] ? 0 : 1;
      d = &ctx->eve_dist[w * 2 + e][combo];
    }
    const double u = rng.uniform();
    int o = 0;
    double acc = 0.0;
    for (; o < 7; ++o) {
      acc += (*d)[o];
      if (u < acc) break;
    }
    const bool ident = ctx->c_identity[combo];
    const int aa = (o >> 2) & 1 ? -1 : 1;
    int bb = (o >> 1) & 1 ? -1 : 1;
    const int cc = ident ? 0 : ((o & 1) ? -1 : 1);
    if (opts->adversary.kind == Adversary::Kind::FlipAnnouncements &&
        rng.uniform() < opts->adversary.rate) {
      bb = -bb;
    }

    const ComboInfo& info = ctx->combos[combo];
    if (info.disp == Disposition::Key) {
      t.key++;
      t.combo_count[info.combo_id]++;
      if (aa * bb * cc != info.parity_sign) t.combo_err[info.combo_id]++;
    } else if (info.disp == Disposition::BellTest) {
      t.test++;
      t.bell_count[info.bell_slot]++;
      t.bell_corr[info.bell_slot] += ident ? aa * bb : aa * bb * cc;
    } else {
      t.discard++;
    }

    if (record) {
      ConferenceRound row;
      row.settings[0] = static_cast<std::uint8_t>(sa);
      row.settings[1] = static_cast<std::uint8_t>(sb);
      row.settings[2] = static_cast<std::uint8_t>(sc);
      row.outcomes[0] = static_cast<std::int8_t>(aa);
      row.outcomes[1] = static_cast<std::int8_t>(bb);
      row.outcomes[2] = static_cast<std::int8_t>(cc);
      row.disposition = info.disp;
      (*record)[i] = row;
    }
  }
};

ConfTally conf_serial(const ConfKernel& k, long rounds) {
  ConfTally t{};
  for (long i = 0; i < rounds; ++i) k(i, t);
  return t;
}

#ifdef _OPENMP
#pragma omp declare reduction(conf_sum : ConfTally : omp_out += omp_in) \
    initializer(omp_priv = ConfTally{})
#endif

ConfTally conf_parallel(const ConfKernel& k, long rounds) {
#ifdef _OPENMP
  ConfTally t{};
#pragma omp parallel for schedule(static) reduction(conf_sum : t)
  for (long i = 0; i < rounds; ++i) k(i, t);
  return t;
#else
  return conf_serial(k, rounds);
#endif
}

}  // namespace

std::array<CorrelationTable, 4> correlation_tables() {
  const StateVector ghz = conference_state(0.5);
  const std::array<std::array<char, 3>, 4> combos = {{{'X', 'X', 'X'},
                                                      {'X', 'Y', 'Y'},
                                                      {'Y', 'X', 'Y'},
                                                      {'Y', 'Y', 'X'}}};
  std::array<CorrelationTable, 4> out;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const TripleSetting sa = setting_from(pauli_observable(combos[c][0]));
    const TripleSetting sb = setting_from(pauli_observable(combos[c][1]));
    const TripleSetting sc = setting_from(pauli_observable(combos[c][2]));
    const auto dist = triple_distribution(ghz, sa, sb, sc);
    CorrelationTable table;
    table.settings = combos[c];
    int row = 0;
    for (int o = 0; o < 8; ++o) {
      if (dist[o] < 1e-9) continue;
      if (row >= 4) throw std::logic_error("more than four outcome rows");
      table.rows[row][0] = (o >> 2) & 1 ? -1 : 1;
      table.rows[row][1] = (o >> 1) & 1 ? -1 : 1;
      table.rows[row][2] = o & 1 ? -1 : 1;
      ++row;
    }
    if (row != 4) throw std::logic_error("expected four outcome rows");
    out[c] = table;
  }
  return out;
}

CombinationQber conference_qber_analytic(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("conference_qber_analytic requires p in (0,1]");
  }
  const double d = std::sqrt(1.0 - p) - std::sqrt(p);
  const double q = 0.5 * d * d;
  CombinationQber out;
  out.xxx = 0.0;
  out.xyy = 0.0;
  out.yxy = q;
  out.yyx = q;
  out.overall_sifted = 0.25 * (out.xxx + out.xyy + out.yxy + out.yyx);
  return out;
}

double bell_I(double p, double theta) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("bell_I requires p in (0,1)");
  }
  const StateVector st = conference_state(p);
  const qcore::Observable b1 =
      qcore::pauli_combo(std::sin(theta), 0.0, std::cos(theta));
  const qcore::Observable b2 =
      qcore::pauli_combo(-std::sin(theta), 0.0, std::cos(theta));
  const qcore::Observable a1 = qcore::sigma_z();
  const qcore::Observable a2 = qcore::sigma_x();
  const qcore::Observable c1 = qcore::sigma_x();
  auto e2 = [&](const qcore::Observable& a, const qcore::Observable& b) {
    return qcore::expectation(st, {{'A', a}, {'B', b}});
  };
  auto e3 = [&](const qcore::Observable& a, const qcore::Observable& b) {
    return qcore::expectation(st, {{'A', a}, {'B', b}, {'C', c1}});
  };
  return e2(a1, b1) + e2(a1, b2) + e3(a2, b1) - e3(a2, b2);
}

double optimal_violation(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("optimal_violation requires p in (0,1)");
  }
  return 2.0 * std::sqrt(1.0 + 4.0 * p * (1.0 - p));
}

double optimal_theta(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("optimal_theta requires p in (0,1)");
  }
  const double scale = std::sqrt(1.0 + 4.0 * p * (1.0 - p));
  return std::atan2(1.0 / scale, 2.0 * std::sqrt(p * (1.0 - p)) / scale);
}

ConferenceReport run_conference(double p, const ConferenceOptions& opts,
                                std::vector<ConferenceRound>* record) {
  if (opts.rounds < 1) {
    throw std::invalid_argument("rounds must be >= 1");
  }
  if (opts.secure && !(p > 0.0 && p < 1.0)) {
    throw std::domain_error("secure mode requires p in (0,1)");
  }
  const ConferenceCtx ctx = make_conference_ctx(p, opts);
  if (record) record->assign(opts.rounds, ConferenceRound{});
  ConfKernel k{&ctx, &opts, record};
  const ConfTally t = opts.parallel ? conf_parallel(k, opts.rounds)
                                    : conf_serial(k, opts.rounds);

  ConferenceReport r;
  r.p = p;
  r.secure = opts.secure;
  r.rounds = opts.rounds;
  r.key_count = t.key;
  r.test_count = t.test;
  r.discard_count = t.discard;
  r.combo_counts = t.combo_count;
  r.combo_errors = t.combo_err;
  auto rate = [](long err, long count) {
    return count > 0 ? static_cast<double>(err) / count : 0.0;
  };
  r.qber_xxx = rate(t.combo_err[0], t.combo_count[0]);
  r.qber_xyy = rate(t.combo_err[1], t.combo_count[1]);
  r.qber_yxy = rate(t.combo_err[2], t.combo_count[2]);
  r.qber_yyx = rate(t.combo_err[3], t.combo_count[3]);
  r.qber_overall = rate(t.combo_err[0] + t.combo_err[1] + t.combo_err[2] +
                            t.combo_err[3],
                        t.key);
  r.analytic = conference_qber_analytic(p);
  r.key_rate_expected = ctx.key_rate_expected;
  r.key_rate = static_cast<double>(t.key) / opts.rounds;
  r.bell_e_expected = ctx.bell_e;
  if (opts.secure) {
    r.bell_expected = ctx.bell_expected;
    double s = 0.0;
    const double signs[4] = {1.0, 1.0, 1.0, -1.0};
    for (int i = 0; i < 4; ++i) {
      r.bell_combos[i].count = t.bell_count[i];
      r.bell_combos[i].corr = t.bell_corr[i];
      const double e = t.bell_count[i] > 0
                           ? static_cast<double>(t.bell_corr[i]) /
                                 t.bell_count[i]
                           : 0.0;
      s += signs[i] * e;
    }
    r.bell_mc = s;
  }

  // Verdict: key rate, per-combination error rates, and (secure mode) the
  // Bell estimate must all sit inside their three-sigma gates.
  Verdict v = Verdict::Clean;
  const double f = ctx.key_rate_expected;
  if (std::abs(r.key_rate - f) >
      3.0 * std::sqrt(f * (1.0 - f) / opts.rounds)) {
    v = Verdict::CheatSuspected;
  }
  const double expected_q[4] = {r.analytic.xxx, r.analytic.xyy, r.analytic.yxy,
                                r.analytic.yyx};
  const double observed_q[4] = {r.qber_xxx, r.qber_xyy, r.qber_yxy,
                                r.qber_yyx};
  for (int i = 0; i < 4 && v == Verdict::Clean; ++i) {
    if (t.combo_count[i] == 0) {
      v = Verdict::CheatSuspected;
      break;
    }
    if (expected_q[i] < 1e-12) {
      if (t.combo_err[i] != 0) v = Verdict::CheatSuspected;
    } else {
      const double sigma = std::sqrt(expected_q[i] * (1.0 - expected_q[i]) /
                                     t.combo_count[i]);
      if (std::abs(observed_q[i] - expected_q[i]) > 3.0 * sigma) {
        v = Verdict::CheatSuspected;
      }
    }
  }
  if (opts.secure && v == Verdict::Clean) {
    double var = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (t.bell_count[i] == 0) {
        v = Verdict::CheatSuspected;
        break;
      }
      var += (1.0 - ctx.bell_e[i] * ctx.bell_e[i]) / t.bell_count[i];
    }
    if (v == Verdict::Clean &&
        std::abs(r.bell_mc - r.bell_expected) > 3.0 * std::sqrt(var)) {
      v = Verdict::CheatSuspected;
    }
  }
  r.verdict = v;
  return r;
}

std::string ConferenceReport::csv_header() {
  return "p,mode,qber_xxx,qber_xyy,qber_yxy,qber_yyx,qber_overall,key_rate,"
         "bell_expected,bell_measured,verdict";
}

std::string ConferenceReport::csv_row() const {
  std::ostringstream out;
  out << fmt(p) << ',' << (secure ? "secure" : "plain") << ','
      << fmt(qber_xxx) << ',' << fmt(qber_xyy) << ',' << fmt(qber_yxy) << ','
      << fmt(qber_yyx) << ',' << fmt(qber_overall) << ',' << fmt(key_rate)
      << ',' << fmt(secure ? bell_expected : 0.0) << ','
      << fmt(secure ? bell_mc : 0.0) << ',' << to_string(verdict);
  return out.str();
}

std::string ConferenceReport::summary() const {
  std::ostringstream out;
  out << "conference p=" << fmt(p) << " mode="
      << (secure ? "secure" : "plain") << "\n"
      << "  rounds " << rounds << ": key " << key_count << ", test "
      << test_count << ", discarded " << discard_count << "\n"
      << "  qber xxx=" << fmt(qber_xxx) << " xyy=" << fmt(qber_xyy)
      << " yxy=" << fmt(qber_yxy) << " (exp " << fmt(analytic.yxy)
      << ") yyx=" << fmt(qber_yyx) << "\n"
      << "  key rate " << fmt(key_rate) << " (expected "
      << fmt(key_rate_expected) << ")\n";
  if (secure) {
    out << "  bell " << fmt(bell_mc) << " (expected " << fmt(bell_expected)
        << ")\n";
  }
  out << "  verdict " << to_string(verdict);
  return out.str();
}

}  // namespace coqkd::confkey
