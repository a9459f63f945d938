#include "coqkd/states/resource.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coqkd/qcore/measure.hpp"
#include "coqkd/qcore/metrics.hpp"

namespace coqkd::states {

using qcore::cx;
using qcore::StateVector;

qcore::StateVector bell(BellKind kind, char q1, char q2) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::PhiPlus:
      a(0) = r;
      a(3) = r;
      break;
    case BellKind::PhiMinus:
      a(0) = r;
      a(3) = -r;
      break;
    case BellKind::PsiPlus:
      a(1) = r;
      a(2) = r;
      break;
    case BellKind::PsiMinus:
      a(1) = r;
      a(2) = -r;
      break;
  }
  return StateVector(std::move(a), {q1, q2});
}

namespace {

BellKind parse_bell(const std::string& s) {
  if (s == "phi+") return BellKind::PhiPlus;
  if (s == "phi-") return BellKind::PhiMinus;
  if (s == "psi+") return BellKind::PsiPlus;
  if (s == "psi-") return BellKind::PsiMinus;
  throw std::invalid_argument("unknown bell ket: " + s);
}

const char* bell_name(BellKind k) {
  switch (k) {
    case BellKind::PhiPlus: return "phi+";
    case BellKind::PhiMinus: return "phi-";
    case BellKind::PsiPlus: return "psi+";
    case BellKind::PsiMinus: return "psi-";
  }
  return "?";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

StateVector build_nmm(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("nmm requires p in (0,1)");
  }
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(8);
  const double sp = std::sqrt(p / 2.0);
  const double sq = std::sqrt((1.0 - p) / 2.0);
  a(0) = sp;   // |000>
  a(3) = sp;   // |011>
  a(4) = sq;   // |100>
  a(7) = -sq;  // |111>
  return StateVector(std::move(a), {'C', 'A', 'B'});
}

StateVector build_phi_u(double a_par) {
  if (!(a_par >= 0.0 && a_par <= 1.0)) {
    throw std::domain_error("phi_u requires a in [0,1]");
  }
  const Eigen::Matrix2cd u = entropy_match_unitary(a_par);
  // (|0>|phi+> + |1>(I x U)|phi->)/sqrt(2)
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
  const double h = 0.5;
  amps(0) = h;
  amps(3) = h;
  amps(4) = h * u(0, 0);
  amps(5) = h * u(1, 0);
  amps(6) = -h * u(0, 1);
  amps(7) = -h * u(1, 1);
  return StateVector(std::move(amps), {'C', 'A', 'B'});
}

StateVector build_r1() {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(16);
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  a(0b0010) = c;
  a(0b0100) = c;
  a(0b0001) = c;
  a(0b0111) = -c;
  a(0b1000) = c;
  a(0b1100) = c;
  a(0b1011) = c;
  a(0b1111) = -c;
  return StateVector(std::move(a), {'D', 'C', 'A', 'B'});
}

StateVector build_cluster4() {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(16);
  a(0b0000) = 0.5;
  a(0b0011) = 0.5;
  a(0b1100) = 0.5;
  a(0b1111) = -0.5;
  return StateVector(std::move(a), {'D', 'C', 'A', 'B'});
}

}  // namespace

ResourceSpec ResourceSpec::parse(const std::string& text) {
  ResourceSpec spec;
  bool have_family = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("expected key=value, got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "family") {
      have_family = true;
      if (value == "ghz3") spec.family = Family::Ghz3;
      else if (value == "nmm") spec.family = Family::Nmm;
      else if (value == "phi_u") spec.family = Family::PhiU;
      else if (value == "ghz4") spec.family = Family::Ghz4;
      else if (value == "cluster4") spec.family = Family::Cluster4;
      else if (value == "r1") spec.family = Family::R1;
      else if (value == "four_general") spec.family = Family::FourGeneral;
      else if (value == "tmes") spec.family = Family::Tmes;
      else throw std::invalid_argument("unknown family: " + value);
    } else if (key == "p") {
      spec.p = std::stod(value);
    } else if (key == "a") {
      spec.a = std::stod(value);
    } else if (key == "kets") {
      std::istringstream ks(value);
      std::string tok;
      std::size_t i = 0;
      while (std::getline(ks, tok, ',')) {
        if (i >= 4) throw std::invalid_argument("expected exactly 4 kets");
        spec.kets[i++] = parse_bell(trim(tok));
      }
      if (i != 4) throw std::invalid_argument("expected exactly 4 kets");
    } else {
      throw std::invalid_argument("unknown resource key: " + key);
    }
  }
  if (!have_family) throw std::invalid_argument("resource needs a family");
  return spec;
}

std::string ResourceSpec::describe() const {
  std::ostringstream out;
  switch (family) {
    case Family::Ghz3: out << "ghz3"; break;
    case Family::Nmm: out << "nmm p=" << p; break;
    case Family::PhiU: out << "phi_u a=" << a; break;
    case Family::Ghz4: out << "ghz4"; break;
    case Family::Cluster4: out << "cluster4"; break;
    case Family::R1: out << "r1"; break;
    case Family::FourGeneral:
      out << "four_general kets=" << bell_name(kets[0]) << ","
          << bell_name(kets[1]) << "," << bell_name(kets[2]) << ","
          << bell_name(kets[3]);
      break;
    case Family::Tmes: out << "tmes p=" << p; break;
  }
  return out.str();
}

qcore::StateVector build(const ResourceSpec& spec) {
  switch (spec.family) {
    case Family::Ghz3: {
      Eigen::VectorXcd a = Eigen::VectorXcd::Zero(8);
      a(0) = a(7) = 1.0 / std::sqrt(2.0);
      return StateVector(std::move(a), {'C', 'A', 'B'});
    }
    case Family::Nmm:
      return build_nmm(spec.p);
    case Family::PhiU:
      return build_phi_u(spec.a);
    case Family::Ghz4: {
      Eigen::VectorXcd a = Eigen::VectorXcd::Zero(16);
      a(0) = a(15) = 1.0 / std::sqrt(2.0);
      return StateVector(std::move(a), {'D', 'C', 'A', 'B'});
    }
    case Family::Cluster4:
      return build_cluster4();
    case Family::R1:
      return build_r1();
    case Family::FourGeneral: {
      std::array<StateVector, 4> kets;
      for (int i = 0; i < 4; ++i) {
        kets[i] = bell(spec.kets[i], 'A', 'B');
      }
      return build_four_general(kets);
    }
    case Family::Tmes:
      return tmes_construct(spec.p);
  }
  throw std::logic_error("unhandled family");
}

qcore::StateVector build_four_general(
    const std::array<qcore::StateVector, 4>& kets) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  for (int i = 0; i < 4; ++i) {
    if (kets[i].num_qubits() != 2) {
      throw std::invalid_argument("four_general kets must be two-qubit states");
    }
    if (qcore::concurrence(kets[i]) < 1.0 - qcore::kMaximalMixMargin) {
      throw std::invalid_argument(
          "four_general kets must be maximally entangled");
    }
    amps.segment(4 * i, 4) = 0.5 * kets[i].amplitudes();
  }
  return StateVector(std::move(amps), {'D', 'C', 'A', 'B'});
}

double lu_match_parameter(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::domain_error("lu_match_parameter requires a in [0,1]");
  }
  return 0.5 * (1.0 - std::sqrt(a));
}

Eigen::Matrix2cd entropy_match_unitary(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::domain_error("entropy_match_unitary requires a in [0,1]");
  }
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(1.0 - a);
  Eigen::Matrix2cd u;
  u << sa, sb, sb, -sa;
  return u;
}

Eigen::Matrix4cd tmes_unitary(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("tmes_unitary requires p in [0,1]");
  }
  const double sp = std::sqrt(p);
  const double sq = std::sqrt(1.0 - p);
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd sz;
  sz << 1, 0, 0, -1;
  u.block<2, 2>(0, 0) = sp * id;
  u.block<2, 2>(0, 2) = -sq * sz;
  u.block<2, 2>(2, 0) = sq * sz;
  u.block<2, 2>(2, 2) = sp * id;
  return u;
}

qcore::StateVector tmes_construct(double p) {
  const StateVector seed =
      tensor(qcore::computational_ket("0", {'C'}), bell(BellKind::PhiPlus, 'A', 'B'));
  return apply_many(seed, {'C', 'A'}, tmes_unitary(p));
}

const char* to_string(Suitability s) {
  switch (s) {
    case Suitability::Mmm: return "MMM";
    case Suitability::Nmm: return "NMM";
    case Suitability::Mnm: return "MNM";
    case Suitability::Mmn: return "MMN";
    case Suitability::Unsuitable: return "UNSUITABLE";
    case Suitability::FourQubitOk: return "FOUR_QUBIT_OK";
    case Suitability::FourQubitUnsuitable: return "FOUR_QUBIT_UNSUITABLE";
  }
  return "?";
}

std::string SuitabilityVerdict::describe() const {
  std::ostringstream out;
  out << to_string(klass) << " entropies=[";
  for (std::size_t i = 0; i < marginal_entropies.size(); ++i) {
    if (i) out << ", ";
    out << marginal_entropies[i];
  }
  out << "]";
  if (any_may_control) {
    out << " any party may control";
  } else if (!controllers.empty()) {
    out << " controllers=";
    for (char c : controllers) out << c;
  }
  return out.str();
}

SuitabilityVerdict classify(const qcore::StateVector& s) {
  const int n = s.num_qubits();
  if (n != 3 && n != 4) {
    throw std::invalid_argument("classify expects a 3- or 4-qubit state");
  }
  SuitabilityVerdict v;
  v.marginal_entropies = qcore::marginal_entropies(s);
  std::vector<int> non_maximal;
  for (int i = 0; i < n; ++i) {
    if (v.marginal_entropies[i] < 1.0 - qcore::kMaximalMixMargin) {
      non_maximal.push_back(i);
    }
  }

  if (n == 3) {
    if (non_maximal.empty()) {
      v.klass = Suitability::Mmm;
      v.any_may_control = true;
      v.controllers = s.qubit_order();
    } else if (non_maximal.size() == 1) {
      const int pos = non_maximal[0];
      v.klass = pos == 0 ? Suitability::Nmm
                         : (pos == 1 ? Suitability::Mnm : Suitability::Mmn);
      v.controllers = {s.qubit_order()[pos]};
    } else {
      v.klass = Suitability::Unsuitable;
    }
    return v;
  }

  // Four qubits: the first two parties control. At least two maximal
  // marginals, and every computational-basis collapse on the controllers must
  // leave a maximally entangled pair.
  const std::vector<char> controllers = {s.qubit_order()[0],
                                         s.qubit_order()[1]};
  bool ok = static_cast<int>(non_maximal.size()) <= n - 2;
  if (ok) {
    const auto branches =
        qcore::measure(s, qcore::computational_basis(2), controllers);
    for (const auto& b : branches) {
      if (b.empty_branch) continue;
      if (qcore::concurrence(b.state) < 1.0 - qcore::kMaximalMixMargin) {
        ok = false;
        break;
      }
    }
  }
  v.klass = ok ? Suitability::FourQubitOk : Suitability::FourQubitUnsuitable;
  if (ok) v.controllers = controllers;
  return v;
}

}  // namespace coqkd::states
