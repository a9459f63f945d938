#include "coqkd/cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "coqkd/confkey/conference.hpp"
#include "coqkd/protocol/four_qubit.hpp"
#include "coqkd/protocol/rounds.hpp"
#include "coqkd/rng.hpp"
#include "coqkd/states/resource.hpp"
#include "coqkd/teleport/teleport.hpp"

namespace coqkd::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CsvWriter {
  std::ofstream file;
  bool to_stdout = false;

  CsvWriter(const std::string& path, const std::string& header) {
    if (path.empty()) {
      to_stdout = true;
      std::cout << header << '\n';
      return;
    }
    file.open(path);
    if (!file) {
      throw std::runtime_error("cannot open output file: " + path);
    }
    file << header << '\n';
  }

  void row(const std::string& r) {
    if (to_stdout) {
      std::cout << r << '\n';
    } else {
      file << r << '\n';
    }
  }
};

struct ExperimentConfig {
  long rounds = 100000;
  std::uint64_t seed = 1;
  bool serial = false;
  std::string out;
  std::string adversary = "none";
  double adversary_rate = 0.0;
  std::string config;  // consumed before parsing; bound for --help only
};

void add_common(CLI::App* cmd, ExperimentConfig& o, bool with_adversary = true) {
  cmd->add_option("--rounds", o.rounds, "simulated rounds per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "64-bit master seed");
  cmd->add_flag("--serial", o.serial,
                "run the serial reference kernel instead of the parallel one");
  cmd->add_option("--out", o.out, "CSV output path (stdout when omitted)");
  cmd->add_option("--config", o.config,
                  "flat key=value file, # comments; explicit flags override "
                  "its entries");
  if (with_adversary) {
    cmd->add_option("--adversary", o.adversary,
                    "none | flip | intercept")
        ->check(CLI::IsMember({"none", "flip", "intercept"}));
    cmd->add_option("--adversary-rate", o.adversary_rate,
                    "flip fraction or interception probability")
        ->check(CLI::Range(0.0, 1.0));
  }
}

// The config option is handled before parsing: flat key=value lines become
// --key value pairs unless the same flag already appears on the command
// line, so explicit flags always win.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw std::invalid_argument("--config needs a file path");
      }
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) {
    throw std::runtime_error("cannot read config file: " + config_path);
  }
  std::size_t insert_at = 0;
  while (insert_at < args.size() && args[insert_at].rfind("-", 0) == 0) {
    ++insert_at;
  }
  if (insert_at < args.size()) ++insert_at;  // place after the subcommand
  std::string line;
  std::vector<std::string> injected;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line is not key=value: " + line);
    }
    const std::string flag = "--" + strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    bool given = false;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    }
    if (given) continue;
    injected.push_back(flag);
    if (value == "true") continue;  // bare flags
    injected.push_back(value);
  }
  args.insert(args.begin() + insert_at, injected.begin(), injected.end());
  return args;
}

protocol::Adversary adversary_from(const ExperimentConfig& o) {
  protocol::Adversary a;
  if (o.adversary == "flip") {
    a.kind = protocol::Adversary::Kind::FlipAnnouncements;
  } else if (o.adversary == "intercept") {
    a.kind = protocol::Adversary::Kind::InterceptResend;
  }
  a.rate = o.adversary_rate;
  return a;
}

double real_grid_entry(const std::string& token) {
  const std::complex<double> v = parse_complex(token);
  if (v.imag() != 0.0) {
    throw std::domain_error(
        "complex parameters are not allowed in sweep grids: " + token);
  }
  return v.real();
}

std::vector<double> parse_real_grid(const std::string& text) {
  // parse_grid handles start:stop:step; lists and single values may still
  // carry a complex literal, which is rejected with a diagnostic.
  if (text.find(':') != std::string::npos) return parse_grid(text);
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    out.push_back(real_grid_entry(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty grid: " + text);
  return out;
}

// ---- subcommand runners ----

int run_classify(const std::string& family, double p, double a,
                 const std::string& kets, const std::string& resource_file,
                 const std::string& out_path) {
  states::ResourceSpec spec;
  if (!resource_file.empty()) {
    std::ifstream in(resource_file);
    if (!in) {
      throw std::runtime_error("cannot read resource file: " + resource_file);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    spec = states::ResourceSpec::parse(buf.str());
  } else {
    std::ostringstream block;
    block << "family=" << family << "\n";
    block << "p=" << fmt(p) << "\n";
    block << "a=" << fmt(a) << "\n";
    if (!kets.empty()) block << "kets=" << kets << "\n";
    spec = states::ResourceSpec::parse(block.str());
  }
  const auto state = states::build(spec);
  const auto verdict = states::classify(state);
  std::cout << spec.describe() << ": " << verdict.describe() << "\n";
  if (!out_path.empty()) {
    CsvWriter csv(out_path, "family,class,controllers,s1,s2,s3,s4");
    std::ostringstream row;
    row << spec.describe() << ',' << states::to_string(verdict.klass) << ',';
    for (char c : verdict.controllers) row << c;
    for (int i = 0; i < 4; ++i) {
      row << ',';
      if (i < static_cast<int>(verdict.marginal_entropies.size())) {
        row << fmt(verdict.marginal_entropies[i]);
      } else {
        row << "nan";
      }
    }
    csv.row(row.str());
  }
  return 0;
}

int run_coqkd(const std::string& p_text, const std::string& n_text,
              const std::string& mode_text, const ExperimentConfig& common) {
  const auto p_grid = parse_real_grid(p_text);
  std::vector<double> n_grid;
  for (const double v : parse_real_grid(n_text)) n_grid.push_back(v);

  protocol::RunOptions opts;
  opts.mode = mode_text == "security" ? protocol::RunMode::WithSecurity
                                      : protocol::RunMode::KeyrateOnly;
  opts.rounds = common.rounds;
  opts.seed = common.seed;
  opts.parallel = !common.serial;
  opts.adversary = adversary_from(common);

  CsvWriter csv(common.out,
                "p,n,p_plus,n1,qber_analytic,qber_mc,qber_weighted_analytic,"
                "qber_weighted_mc,sifted_rate,relative_rate,chsh_expected,"
                "chsh_mc,verdict_plus,verdict_minus");
  double max_delta = 0.0;
  std::uint64_t point = 0;
  for (const double p : p_grid) {
    for (const double n : n_grid) {
      protocol::RunOptions point_opts = opts;
      point_opts.seed = derive_seed(common.seed, point++);
      const auto full = protocol::run_protocol(p, n, point_opts);
      const auto& plus = full.plus_branch;
      std::ostringstream row;
      row << fmt(p) << ',' << fmt(n) << ',' << fmt(plus.branch_probability)
          << ',' << fmt(plus.little_n.real()) << ',' << fmt(plus.qber_analytic)
          << ',' << fmt(plus.qber_mc) << ','
          << fmt(full.qber_weighted_analytic) << ','
          << fmt(full.qber_weighted_mc) << ',' << fmt(plus.sifted_rate) << ','
          << fmt(plus.relative_rate) << ',' << fmt(plus.chsh_expected) << ','
          << fmt(plus.chsh_mc) << ',' << to_string(plus.verdict) << ','
          << to_string(full.minus_branch.verdict);
      csv.row(row.str());
      max_delta = std::max(max_delta,
                           std::abs(plus.qber_mc - plus.qber_analytic));
    }
  }
  std::cout << "coqkd sweep: " << p_grid.size() * n_grid.size()
            << " points, max |qber_mc - qber_analytic| = " << fmt(max_delta)
            << "\n";
  return 0;
}

int run_coqkd4(const std::string& path_text, const std::string& alpha_text,
               const std::string& beta_text, const std::string& m_text,
               const ExperimentConfig& common) {
  protocol::FourQubitOptions opts;
  opts.rounds = common.rounds;
  opts.parallel = !common.serial;
  opts.path = path_text == "joint" ? protocol::FourQubitOptions::Path::Joint
                                   : protocol::FourQubitOptions::Path::Sequential;
  const auto resource = states::build({.family = states::Family::FourGeneral});

  CsvWriter csv(common.out,
                "path,alpha,beta,m,controller_prob,q_formula,q_oracle,"
                "q_agrees,qber_mc,sifted_rate,verdict");
  std::uint64_t point = 0;
  double max_gap = 0.0;
  auto emit = [&](const protocol::FourQubitOptions& o) {
    protocol::FourQubitOptions run = o;
    run.seed = derive_seed(common.seed, point++);
    const auto r = protocol::four_qubit_run(resource, run);
    std::ostringstream row;
    row << path_text << ',' << fmt(o.alpha) << ',' << fmt(o.beta) << ','
        << fmt(o.m) << ',' << fmt(r.controller_outcome_probability) << ','
        << fmt(r.q_formula) << ',' << fmt(r.q_oracle) << ','
        << (r.q_formula_agrees ? "yes" : "no") << ',' << fmt(r.qber_mc) << ','
        << fmt(r.sifted_rate) << ',' << to_string(r.verdict);
    csv.row(row.str());
    max_gap = std::max(max_gap, std::abs(r.q_formula - r.q_oracle));
  };
  if (opts.path == protocol::FourQubitOptions::Path::Joint) {
    for (const double m : parse_real_grid(m_text)) {
      protocol::FourQubitOptions o = opts;
      o.m = m;
      emit(o);
    }
  } else {
    for (const double alpha : parse_real_grid(alpha_text)) {
      for (const double beta : parse_real_grid(beta_text)) {
        protocol::FourQubitOptions o = opts;
        o.alpha = alpha;
        o.beta = beta;
        emit(o);
      }
    }
  }
  std::cout << "coqkd4 sweep: max |q_formula - q_oracle| = " << fmt(max_gap)
            << " (oracle is authoritative)\n";
  return 0;
}

int run_conference(const std::string& p_text, bool secure,
                   const ExperimentConfig& common) {
  confkey::ConferenceOptions opts;
  opts.rounds = common.rounds;
  opts.secure = secure;
  opts.parallel = !common.serial;
  opts.adversary = adversary_from(common);

  CsvWriter csv(common.out, confkey::ConferenceReport::csv_header());
  std::uint64_t point = 0;
  double max_delta = 0.0;
  for (const double p : p_text.empty() ? std::vector<double>{0.5}
                                       : parse_real_grid(p_text)) {
    confkey::ConferenceOptions o = opts;
    o.seed = derive_seed(common.seed, point++);
    const auto r = confkey::run_conference(p, o);
    csv.row(r.csv_row());
    max_delta = std::max(max_delta, std::abs(r.qber_yxy - r.analytic.yxy));
  }
  std::cout << "conference sweep: max |qber_yxy - analytic| = "
            << fmt(max_delta) << "\n";
  return 0;
}

int run_teleport(const std::string& p_text, const std::string& n_text,
                 const ExperimentConfig& common) {
  CsvWriter csv(common.out, "p,n,p_plus,F_plus,F_minus,F_avg,C_avg,F_sim_mean");
  std::uint64_t point = 0;
  for (const double p : parse_real_grid(p_text)) {
    const auto points = teleport::sweep(p, parse_real_grid(n_text));
    for (const auto& pt : points) {
      const double sim = teleport::simulate_roundtrip_design_mean(
          pt.p, pt.n, derive_seed(common.seed, point++), common.rounds,
          !common.serial);
      std::ostringstream row;
      row << fmt(pt.p) << ',' << fmt(pt.n) << ',' << fmt(pt.p_plus) << ','
          << fmt(pt.f_plus) << ',' << fmt(pt.f_minus) << ',' << fmt(pt.f_avg)
          << ',' << fmt(pt.c_avg) << ',' << fmt(sim);
      csv.row(row.str());
    }
  }
  std::cout << "teleport sweep complete\n";
  return 0;
}

int run_tmes_check(const std::string& p_text, const ExperimentConfig& common) {
  CsvWriter csv(common.out, "p,unitarity_residual,state_match_residual");
  bool ok = true;
  for (const double p : parse_real_grid(p_text)) {
    const Eigen::Matrix4cd u = states::tmes_unitary(p);
    const double unit_res =
        (u.adjoint() * u - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
    const auto constructed = states::tmes_construct(p);
    const auto reference =
        states::build({.family = states::Family::Nmm, .p = p});
    const double match_res = (constructed.amplitudes() -
                              reference.amplitudes())
                                 .cwiseAbs()
                                 .maxCoeff();
    std::ostringstream row;
    row << fmt(p) << ',' << fmt(unit_res) << ',' << fmt(match_res);
    csv.row(row.str());
    std::cout << "p=" << fmt(p) << " unitarity residual " << fmt(unit_res)
              << ", state match " << fmt(match_res) << "\n";
    ok = ok && unit_res < 1e-12 && match_res < 1e-12;
  }
  std::cout << (ok ? "tmes-check passed" : "tmes-check FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw std::invalid_argument("empty grid: " + text);
    return out;
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) {
    throw std::invalid_argument("grid must be start:stop:step, got " + text);
  }
  const double start = std::stod(text.substr(0, c1));
  const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (step <= 0.0 || stop < start) {
    throw std::invalid_argument("grid needs step > 0 and stop >= start");
  }
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double v = start + k * step;
    if (v > stop + 1e-12) break;
    out.push_back(v);
  }
  return out;
}

std::complex<double> parse_complex(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  if (text.back() != 'i') {
    return {std::stod(text), 0.0};
  }
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last +/- that is not an exponent sign and not leading.
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      return {std::stod(body.substr(0, i)), std::stod(body.substr(i))};
    }
  }
  return {0.0, std::stod(body)};
}

namespace {

int run_parsed(int argc, const char* const* argv) {
  CLI::App app{"controlled key distribution, conference keys, and cooperative "
               "teleportation over three- and four-qubit resources"};
  app.require_subcommand(1);

  // classify
  auto* classify =
      app.add_subcommand("classify",
                         "classify a resource state by marginal entropies; "
                         "CSV columns: family,class,controllers,s1,s2,s3,s4");
  std::string cl_family = "ghz3", cl_kets, cl_resource, cl_out, cl_config;
  double cl_p = 0.5, cl_a = 0.5;
  classify->add_option("--family", cl_family,
                       "ghz3|nmm|phi_u|ghz4|cluster4|r1|four_general|tmes");
  classify->add_option("--p", cl_p, "weight parameter");
  classify->add_option("--a", cl_a, "unitary parameter");
  classify->add_option("--kets", cl_kets, "four of phi+,phi-,psi+,psi-");
  classify->add_option("--resource", cl_resource,
                       "key=value resource description file");
  classify->add_option("--out", cl_out, "optional CSV output path");
  classify->add_option("--config", cl_config,
                       "flat key=value file; explicit flags override it");

  // coqkd
  auto* coqkd = app.add_subcommand(
      "coqkd",
      "two-party key under a controller's basis choice; CSV columns: "
      "p,n,p_plus,n1,qber_analytic,qber_mc,qber_weighted_analytic,"
      "qber_weighted_mc,sifted_rate,relative_rate,chsh_expected,chsh_mc,"
      "verdict_plus,verdict_minus");
  std::string cq_p = "0.5", cq_n = "0:1:0.05", cq_mode = "keyrate";
  ExperimentConfig cq_common;
  coqkd->add_option("--p", cq_p, "resource weight(s): value, list, or grid");
  coqkd->add_option("--n-grid", cq_n, "controller basis parameter grid");
  coqkd->add_option("--mode", cq_mode, "keyrate | security")
      ->check(CLI::IsMember({"keyrate", "security"}));
  add_common(coqkd, cq_common);

  // coqkd4
  auto* coqkd4 = app.add_subcommand(
      "coqkd4",
      "four-qubit control with two controllers or a joint measurement; CSV "
      "columns: path,alpha,beta,m,controller_prob,q_formula,q_oracle,"
      "q_agrees,qber_mc,sifted_rate,verdict");
  std::string c4_path = "seq", c4_alpha = "0", c4_beta = "0", c4_m = "0";
  ExperimentConfig c4_common;
  coqkd4->add_option("--path", c4_path, "seq | joint")
      ->check(CLI::IsMember({"seq", "joint"}));
  coqkd4->add_option("--alpha", c4_alpha, "second controller parameter grid");
  coqkd4->add_option("--beta", c4_beta, "first controller parameter grid");
  coqkd4->add_option("--m", c4_m, "joint basis parameter grid");
  add_common(coqkd4, c4_common, /*with_adversary=*/false);

  // conference
  auto* conference = app.add_subcommand(
      "conference", "three-party conference key; CSV columns: " +
                        confkey::ConferenceReport::csv_header());
  std::string cf_p = "0.5";
  bool cf_secure = false;
  ExperimentConfig cf_common;
  conference->add_option("--p-grid", cf_p, "resource weight grid");
  conference->add_flag("--secure", cf_secure,
                       "use the 36-combination menus with the Bell test");
  add_common(conference, cf_common);

  // teleport
  auto* teleport_cmd = app.add_subcommand(
      "teleport",
      "cooperative teleportation sweep; CSV columns: "
      "p,n,p_plus,F_plus,F_minus,F_avg,C_avg,F_sim_mean");
  std::string tp_p = "0.5", tp_n = "0:1:0.05";
  ExperimentConfig tp_common;
  teleport_cmd->add_option("--p", tp_p, "resource weight(s)");
  teleport_cmd->add_option("--n-grid", tp_n, "controller basis grid");
  add_common(teleport_cmd, tp_common, /*with_adversary=*/false);

  // tmes-check
  auto* tmes = app.add_subcommand(
      "tmes-check",
      "verify the product-state construction of the resource; CSV columns: "
      "p,unitarity_residual,state_match_residual");
  std::string tm_p = "0.5";
  ExperimentConfig tm_common;
  tmes->add_option("--p", tm_p, "weight parameter grid");
  add_common(tmes, tm_common, /*with_adversary=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (classify->parsed()) {
      return run_classify(cl_family, cl_p, cl_a, cl_kets, cl_resource, cl_out);
    }
    if (coqkd->parsed()) return run_coqkd(cq_p, cq_n, cq_mode, cq_common);
    if (coqkd4->parsed()) {
      return run_coqkd4(c4_path, c4_alpha, c4_beta, c4_m, c4_common);
    }
    if (conference->parsed()) {
      return run_conference(cf_p, cf_secure, cf_common);
    }
    if (teleport_cmd->parsed()) {
      return run_teleport(tp_p, tp_n, tp_common);
    }
    if (tmes->parsed()) return run_tmes_check(tm_p, tm_common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> expanded;
  try {
    expanded = apply_config_file(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<const char*> argv;
  argv.push_back("coqkd");
  for (const auto& a : expanded) argv.push_back(a.c_str());
  return run_parsed(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace coqkd::cli
