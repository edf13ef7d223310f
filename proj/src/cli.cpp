#include "percap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "percap/lifting.hpp"
#include "percap/mc.hpp"
#include "percap/output.hpp"

namespace percap::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  // shared
  int nodes = 200;
  std::string rule = "hermite";
  double tol = 1e-10;
  std::optional<std::string> format;
  std::string out_file;
  bool allow_extrapolation = false;

  // capacity / curve
  double kappa = 0.0;
  std::string level = "2f";
  double kappa_min = -0.4;
  double kappa_max = 1.2;
  double step = 0.2;

  int table = 0;

  // uniqueness
  double q_min = 1e-2;
  double q_max = 50.0;
  int points = 64;

  // simulate / threshold
  int n = 0;
  std::vector<int> m;
  std::vector<double> alpha;
  int trials = 100;
  int restarts = 50;
  std::string method = "exhaustive";
  std::string seed = "1";
};

// Rendered command output: the JSON record plus the CSV form, when one exists.
struct Emission {
  OutputRecord record;
  std::string csv;
  bool csv_default = false;
  int exit_code = kOk;
};

const std::vector<double> kTable3Grid = {-0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
const std::vector<double> kTable2Grid = {-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2};

QuadratureRule make_rule(const Options& opt) {
  if (opt.rule == "hermite") return gauss_hermite_rule(opt.nodes);
  if (opt.rule == "composite") return composite_normal_rule();
  throw UsageError("unknown --rule '" + opt.rule + "' (expected hermite or composite)");
}

SolverConfig make_solver(const Options& opt) {
  SolverConfig cfg;
  cfg.abs_tol = opt.tol;
  return cfg;
}

Json solver_parameters(const Options& opt, const QuadratureRule& rule) {
  Json p;
  p["rule"] = rule.family;
  p["quadrature_order"] = rule.order;
  p["tol"] = opt.tol;
  return p;
}

void check_extrapolation(double kappa, LiftLevel level, const Options& opt) {
  if (level != LiftLevel::L2Full || opt.allow_extrapolation) return;
  if (kappa < kValidatedKappaMin || kappa > kValidatedKappaMax) {
    std::ostringstream os;
    os << "kappa = " << kappa << " is outside the validated range [" << kValidatedKappaMin
       << ", " << kValidatedKappaMax << "] for level 2f; pass --allow-extrapolation";
    throw UsageError(os.str());
  }
}

void add_result_warnings(const CapacityResult& r, std::vector<std::string>& warnings) {
  if (!r.validated) {
    warnings.push_back("kappa = " + format_number(r.kappa) +
                       " lies outside the validated range; result is an extrapolation");
  }
  if (r.level == LiftLevel::L2Full && r.sign_changes != 1) {
    warnings.push_back("kappa = " + format_number(r.kappa) + ": scan found " +
                       std::to_string(r.sign_changes) +
                       " sign changes of q - psi_q(q); the first root was taken");
  }
}

std::string capacity_csv(const std::vector<CapacityResult>& rows) {
  std::string csv = capacity_csv_header() + "\n";
  for (const auto& r : rows) csv += capacity_csv_row(r) + "\n";
  return csv;
}

std::vector<double> kappa_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw UsageError("--step must be > 0");
  if (!(lo <= hi)) throw UsageError("--kappa-min must be <= --kappa-max");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw UsageError("kappa grid too large");
  std::vector<double> grid;
  for (long i = 0; i < count; ++i) {
    grid.push_back(std::round((lo + i * step) * 1e12) / 1e12);
  }
  return grid;
}

Emission cmd_capacity(const Options& opt) {
  const LiftLevel level = parse_lift_level(opt.level);
  check_extrapolation(opt.kappa, level, opt);
  const QuadratureRule rule = make_rule(opt);
  const CapacityResult r = capacity(opt.kappa, level, make_solver(opt), rule);

  Emission e;
  e.record.command = "capacity";
  e.record.parameters = solver_parameters(opt, rule);
  e.record.parameters["kappa"] = opt.kappa;
  e.record.parameters["level"] = opt.level;
  e.record.results.push_back(to_json(r));
  add_result_warnings(r, e.record.warnings);
  e.csv = capacity_csv({r});
  return e;
}

Emission cmd_curve(const Options& opt) {
  const LiftLevel level = parse_lift_level(opt.level);
  const auto grid = kappa_grid(opt.kappa_min, opt.kappa_max, opt.step);
  for (double k : grid) check_extrapolation(k, level, opt);
  const QuadratureRule rule = make_rule(opt);
  const auto points = capacity_curve(grid, level, make_solver(opt), rule);

  Emission e;
  e.record.command = "curve";
  e.record.parameters = solver_parameters(opt, rule);
  e.record.parameters["level"] = opt.level;
  e.record.parameters["kappa_min"] = opt.kappa_min;
  e.record.parameters["kappa_max"] = opt.kappa_max;
  e.record.parameters["step"] = opt.step;
  std::vector<CapacityResult> ok;
  for (const auto& p : points) {
    if (p.ok()) {
      ok.push_back(*p.result);
      e.record.results.push_back(to_json(*p.result));
      add_result_warnings(*p.result, e.record.warnings);
    } else {
      Json err;
      err["type"] = "error";
      err["kappa"] = p.kappa;
      err["message"] = p.error;
      e.record.results.push_back(err);
      e.record.warnings.push_back("kappa = " + format_number(p.kappa) + ": " + p.error);
      e.exit_code = kConvergence;
    }
  }
  e.csv = capacity_csv(ok);
  return e;
}

Emission cmd_table(const Options& opt) {
  const QuadratureRule rule = make_rule(opt);
  const SolverConfig cfg = make_solver(opt);
  Emission e;
  e.record.command = "table";
  e.record.parameters = solver_parameters(opt, rule);
  e.record.parameters["table"] = opt.table;

  std::vector<CapacityResult> rows;
  if (opt.table == 1) {
    for (LiftLevel lv : {LiftLevel::L1, LiftLevel::L2Partial, LiftLevel::L2Full}) {
      rows.push_back(capacity(0.0, lv, cfg, rule));
    }
    e.csv = capacity_csv(rows);
  } else if (opt.table == 2) {
    for (const auto& p : capacity_curve(kTable2Grid, LiftLevel::L2Full, cfg, rule)) {
      if (!p.ok()) throw ConvergenceError(p.error, p.kappa);
      rows.push_back(*p.result);
    }
    e.csv = capacity_csv(rows);
  } else if (opt.table == 3) {
    std::ostringstream csv;
    csv << "level";
    for (double k : kTable3Grid) csv << ',' << format_number(k);
    csv << '\n';
    for (LiftLevel lv : {LiftLevel::L1, LiftLevel::L2Partial, LiftLevel::L2Full}) {
      csv << to_string(lv);
      for (const auto& p : capacity_curve(kTable3Grid, lv, cfg, rule)) {
        if (!p.ok()) throw ConvergenceError(p.error, p.kappa);
        rows.push_back(*p.result);
        csv << ',' << format_number(p.result->alpha_c);
      }
      csv << '\n';
    }
    e.csv = csv.str();
  } else {
    throw UsageError("table must be 1, 2 or 3");
  }
  for (const auto& r : rows) {
    e.record.results.push_back(to_json(r));
    add_result_warnings(r, e.record.warnings);
  }
  return e;
}

Emission cmd_kappa_c(const Options& opt) {
  SolverConfig cfg = kappa_c_config();
  cfg.abs_tol = opt.tol;
  const double kc = kappa_c(cfg);
  Emission e;
  e.record.command = "kappa-c";
  e.record.parameters["tol"] = opt.tol;
  e.record.parameters["bracket"] = Json::array({cfg.bracket_lo, cfg.bracket_hi});
  Json r;
  r["type"] = "kappa_c";
  r["kappa_c"] = kc;
  r["residual"] = std::fabs(crossover_difference(kc));
  e.record.results.push_back(r);
  e.csv = "kappa_c,residual\n" + format_number(kc) + "," + format_number(r["residual"].get<double>()) + "\n";
  return e;
}

Emission cmd_uniqueness(const Options& opt) {
  check_extrapolation(opt.kappa, LiftLevel::L2Full, opt);
  const QuadratureRule rule = make_rule(opt);
  SolverConfig cfg = make_solver(opt);
  cfg.bracket_lo = opt.q_min;
  cfg.bracket_hi = opt.q_max;
  cfg.scan_points = opt.points;
  if (!(opt.q_min > 0.0)) throw UsageError("--q-min must be > 0");
  try {
    cfg.validate();
  } catch (const InvalidArgument& ex) {
    throw UsageError(ex.what());
  }
  const double kappa = opt.kappa;
  const ScanResult scan =
      scan_fixed_point([&](double q) { return psi_q(q, kappa, rule); }, cfg);

  Emission e;
  e.csv_default = true;
  e.record.command = "uniqueness";
  e.record.parameters = solver_parameters(opt, rule);
  e.record.parameters["kappa"] = kappa;
  e.record.parameters["q_min"] = opt.q_min;
  e.record.parameters["q_max"] = opt.q_max;
  e.record.parameters["points"] = opt.points;
  Json summary;
  summary["type"] = "scan_summary";
  summary["sign_changes"] = scan.sign_changes;
  e.record.results.push_back(summary);
  std::string csv = "q2s,residual\n";
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    Json pt;
    pt["type"] = "scan_point";
    pt["q2s"] = scan.grid[i];
    pt["residual"] = scan.residuals[i];
    e.record.results.push_back(pt);
    csv += format_number(scan.grid[i]) + "," + format_number(scan.residuals[i]) + "\n";
  }
  if (scan.sign_changes != 1) {
    e.record.warnings.push_back("scan found " + std::to_string(scan.sign_changes) +
                                " sign changes of q - psi_q(q)");
  }
  e.csv = csv;
  return e;
}

McOptions mc_options(const Options& opt) {
  McOptions mo;
  mo.restarts = opt.restarts;
  return mo;
}

Json mc_parameters(const Options& opt, std::uint64_t seed) {
  Json p;
  p["n"] = opt.n;
  p["kappa"] = opt.kappa;
  p["trials"] = opt.trials;
  p["method"] = opt.method;
  p["restarts"] = opt.restarts;
  p["seed"] = seed;
  return p;
}

void check_mc_common(const Options& opt) {
  if (opt.n < 1) throw UsageError("--n must be >= 1");
  if (opt.trials < 1) throw UsageError("--trials must be >= 1");
  if (opt.restarts < 1) throw UsageError("--restarts must be >= 1");
}

Emission cmd_simulate(const Options& opt) {
  check_mc_common(opt);
  if (opt.m.empty() == opt.alpha.empty()) {
    throw UsageError("simulate needs exactly one of --m or --alpha");
  }
  std::vector<int> grid = opt.m;
  for (double a : opt.alpha) {
    if (!(a > 0.0)) throw UsageError("--alpha values must be > 0");
    grid.push_back(std::max(1, static_cast<int>(std::lround(a * opt.n))));
  }
  for (int m : grid) {
    if (m < 1) throw UsageError("--m values must be >= 1");
  }
  const McMethod method = parse_mc_method(opt.method);
  const std::uint64_t seed = parse_seed(opt.seed);
  const auto estimates =
      estimate_feasibility(opt.n, grid, opt.kappa, opt.trials, method, seed, mc_options(opt));

  Emission e;
  e.record.command = "simulate";
  e.record.parameters = mc_parameters(opt, seed);
  e.record.parameters["m"] = grid;
  std::string csv = mc_csv_header() + "\n";
  for (const auto& est : estimates) {
    e.record.results.push_back(to_json(est));
    csv += mc_csv_row(est) + "\n";
  }
  if (method == McMethod::LocalSearch) {
    e.record.warnings.push_back("local search only certifies feasibility; rates are lower bounds");
  }
  e.csv = csv;
  return e;
}

Emission cmd_threshold(const Options& opt) {
  check_mc_common(opt);
  const McMethod method = parse_mc_method(opt.method);
  const std::uint64_t seed = parse_seed(opt.seed);
  ThresholdConfig cfg;
  cfg.mc = mc_options(opt);
  const ThresholdEstimate t = empirical_threshold(opt.n, opt.kappa, opt.trials, method, seed, cfg);

  Emission e;
  e.record.command = "threshold";
  e.record.parameters = mc_parameters(opt, seed);
  Json summary;
  summary["type"] = "threshold";
  summary["alpha_hat"] = t.alpha_hat;
  summary["m_star"] = t.m_star;
  summary["uncertainty"] = t.uncertainty;
  e.record.results.push_back(summary);
  std::string csv = "alpha_hat,m_star,uncertainty\n" + format_number(t.alpha_hat) + "," +
                    format_number(t.m_star) + "," + format_number(t.uncertainty) + "\n";
  for (const auto& est : t.curve) e.record.results.push_back(to_json(est));
  e.record.warnings.push_back("finite-n 50% crossing; not an estimate of the n -> infinity capacity");
  e.csv = csv;
  return e;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--nodes", opt.nodes, "Gauss-Hermite order")->check(CLI::Range(2, 100000));
  sub->add_option("--rule", opt.rule, "quadrature rule: hermite or composite")
      ->check(CLI::IsMember({"hermite", "composite"}));
  sub->add_option("--tol", opt.tol, "solver residual tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", opt.out_file, "write output to FILE");
  sub->add_flag("--allow-extrapolation", opt.allow_extrapolation,
                "permit level 2f outside the validated kappa range");
}

void add_mc(CLI::App* sub, Options& opt) {
  sub->add_option("--n", opt.n, "dimension")->required();
  sub->add_option("--kappa", opt.kappa, "threshold");
  sub->add_option("--trials", opt.trials, "instances per m");
  sub->add_option("--method", opt.method, "exhaustive or local")
      ->check(CLI::IsMember({"exhaustive", "local", "local_search"}));
  sub->add_option("--restarts", opt.restarts, "local-search restarts");
  sub->add_option("--seed", opt.seed, "64-bit seed, decimal or 0x-hex");
}

}  // namespace

unsigned long long parse_seed(const std::string& text) {
  const bool hex = text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
  const std::string digits = hex ? text.substr(2) : text;
  if (digits.empty() || digits.find_first_of("+- ") != std::string::npos) {
    throw UsageError("invalid seed '" + text + "'");
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(digits, &used, hex ? 16 : 10);
  } catch (const std::exception&) {
    throw UsageError("invalid seed '" + text + "'");
  }
  if (used != digits.size()) throw UsageError("invalid seed '" + text + "'");
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Binary perceptron storage capacity and Monte Carlo feasibility experiments",
               "percap"};
  app.require_subcommand(1, 1);

  auto* capacity_cmd = app.add_subcommand("capacity", "capacity at one kappa");
  capacity_cmd->add_option("--kappa", opt.kappa, "threshold")->required();
  capacity_cmd->add_option("--level", opt.level, "1, 2p or 2f")
      ->check(CLI::IsMember({"1", "2p", "2f"}));
  add_common(capacity_cmd, opt);

  auto* curve_cmd = app.add_subcommand("curve", "capacity over a kappa grid");
  curve_cmd->add_option("--kappa-min", opt.kappa_min);
  curve_cmd->add_option("--kappa-max", opt.kappa_max);
  curve_cmd->add_option("--step", opt.step);
  curve_cmd->add_option("--level", opt.level, "1, 2p or 2f")
      ->check(CLI::IsMember({"1", "2p", "2f"}));
  add_common(curve_cmd, opt);

  auto* table_cmd = app.add_subcommand("table", "reference tables 1, 2 or 3");
  table_cmd->add_option("which", opt.table, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  add_common(table_cmd, opt);

  auto* kc_cmd = app.add_subcommand("kappa-c", "crossover threshold of the 2-partial level");
  add_common(kc_cmd, opt);

  auto* uniq_cmd = app.add_subcommand("uniqueness", "scan of q - psi_q(q)");
  uniq_cmd->add_option("--kappa", opt.kappa, "threshold");
  uniq_cmd->add_option("--q-min", opt.q_min);
  uniq_cmd->add_option("--q-max", opt.q_max);
  uniq_cmd->add_option("--points", opt.points)->check(CLI::Range(2, 1000000));
  add_common(uniq_cmd, opt);

  auto* sim_cmd = app.add_subcommand("simulate", "feasibility rates of random instances");
  add_mc(sim_cmd, opt);
  sim_cmd->add_option("--m", opt.m, "constraint counts")->delimiter(',');
  sim_cmd->add_option("--alpha", opt.alpha, "ratios m/n")->delimiter(',');
  add_common(sim_cmd, opt);

  auto* thr_cmd = app.add_subcommand("threshold", "finite-n 50% feasibility crossing");
  add_mc(thr_cmd, opt);
  add_common(thr_cmd, opt);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    Emission e;
    if (capacity_cmd->parsed()) e = cmd_capacity(opt);
    else if (curve_cmd->parsed()) e = cmd_curve(opt);
    else if (table_cmd->parsed()) e = cmd_table(opt);
    else if (kc_cmd->parsed()) e = cmd_kappa_c(opt);
    else if (uniq_cmd->parsed()) e = cmd_uniqueness(opt);
    else if (sim_cmd->parsed()) e = cmd_simulate(opt);
    else e = cmd_threshold(opt);

    const bool csv = opt.format ? *opt.format == "csv" : e.csv_default;
    const std::string text = csv ? e.csv : emit_json(e.record);
    if (opt.out_file.empty()) {
      out << text;
    } else {
      std::ofstream file(opt.out_file, std::ios::binary);
      if (!file) throw UsageError("cannot open --out file '" + opt.out_file + "'");
      file << text;
      if (!file) throw UsageError("failed writing '" + opt.out_file + "'");
    }
    for (const auto& w : e.record.warnings) err << "warning: " << w << '\n';
    return e.exit_code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityCapError& e) {
    err << "error: " << e.what() << '\n';
    return kRange;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    err << "observed (m, rate):";
    for (const auto& [m, rate] : e.curve()) err << " (" << m << ", " << format_number(rate) << ")";
    err << '\n';
    return kRange;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  }
}

}  // namespace percap::cli
