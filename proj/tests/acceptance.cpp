// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force_oracle.hpp"
#include "numeric_oracles.hpp"
#include "percap/cli.hpp"
#include "percap/lifting.hpp"
#include "percap/mc.hpp"
#include "percap/output.hpp"
#include "reference_tables.hpp"

using namespace percap;
namespace ref = percap::reference;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const QuadratureRule& gh200() {
  static const QuadratureRule r = gauss_hermite_rule(200);
  return r;
}

SolverConfig default_solver() {
  SolverConfig cfg;
  cfg.abs_tol = 1e-10;
  return cfg;
}

bool same_result(const CapacityResult& a, const CapacityResult& b) {
  return a.kappa == b.kappa && a.level == b.level && a.alpha_c == b.alpha_c && a.p2 == b.p2 &&
         a.q2s == b.q2s && a.gamma_sq == b.gamma_sq && a.residual == b.residual &&
         a.iterations == b.iterations && a.quadrature_order == b.quadrature_order &&
         a.validated == b.validated && a.collapsed_to_l1 == b.collapsed_to_l1 &&
         a.sign_changes == b.sign_changes;
}

int cli_code(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

Outcome level1_row() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::size_t i = 0; i < ref::kProgressionKappa.size(); ++i) {
    worst = std::max(worst, std::fabs(capacity_l1(ref::kProgressionKappa[i]).alpha_c - ref::kLevel1[i]));
  }
  const double t = seconds_since(t0);
  return {worst <= 5e-4 && t < 1.0,
          fmt("max |err| = %.2e (tol 5e-4)", worst) + fmt(", runtime %.3f s (limit 1 s)", t)};
}

Outcome level2_partial_row() {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref::kProgressionKappa.size(); ++i) {
    worst = std::max(worst, std::fabs(capacity_l2_partial(ref::kProgressionKappa[i]).alpha_c -
                                      ref::kLevel2Partial[i]));
  }
  bool bit_equal = true;
  for (double k : {0.8, 1.0, 1.2}) {
    bit_equal &= capacity_l2_partial(k).alpha_c == capacity_l1(k).alpha_c;
  }
  return {worst <= 5e-4 && bit_equal, fmt("max |err| = %.2e (tol 5e-4)", worst) +
                                          ", collapse bit-equal at 0.8/1.0/1.2: " +
                                          (bit_equal ? "yes" : "no")};
}

Outcome crossover() {
  const double kc = kappa_c();
  const double err = std::fabs(kc - ref::kKappaC);
  return {err <= 1e-5, fmt("kappa_c = %.9f", kc) + fmt(", |err| = %.2e (tol 1e-5)", err)};
}

Outcome level2_full_table() {
  const auto t0 = Clock::now();
  const QuadratureRule rule = gauss_hermite_rule(200);
  const SolverConfig cfg = default_solver();
  double ea = 0.0, ep = 0.0, eq = 0.0;
  for (std::size_t i = 0; i < ref::kFullKappa.size(); ++i) {
    const auto r = capacity_l2_full(ref::kFullKappa[i], cfg, rule);
    ea = std::max(ea, std::fabs(r.alpha_c - ref::kFullAlpha[i]));
    ep = std::max(ep, std::fabs(*r.p2 - ref::kFullP2[i]));
    eq = std::max(eq, std::fabs(*r.q2s - ref::kFullQ2s[i]));
  }
  const double t = seconds_since(t0);
  return {ea <= 1e-3 && ep <= 1e-3 && eq <= 2e-3 && t < 10.0,
          fmt("max |err| alpha %.2e", ea) + fmt(", p2 %.2e", ep) + fmt(", q2s %.2e", eq) +
              fmt(" (tol 1e-3/1e-3/2e-3), runtime %.2f s (limit 10 s)", t)};
}

Outcome headline() {
  const auto r = capacity_l2_full(0.0, default_solver(), gh200());
  const double err = std::fabs(r.alpha_c - ref::kHeadline);
  return {err <= 1e-5, fmt("alpha_c(0) = %.10f", r.alpha_c) + fmt(", |err| = %.2e (tol 1e-5)", err)};
}

Outcome ordering() {
  const double kc = kappa_c();
  const SolverConfig cfg = default_solver();
  int bad = 0;
  for (double k : ref::kProgressionKappa) {
    const double a1 = capacity(k, LiftLevel::L1, cfg, gh200()).alpha_c;
    const double a2p = capacity(k, LiftLevel::L2Partial, cfg, gh200()).alpha_c;
    const double a2f = capacity(k, LiftLevel::L2Full, cfg, gh200()).alpha_c;
    const bool order = a2f <= a2p + 1e-9 && a2p <= a1 + 1e-9;
    const bool equal = std::fabs(a1 - a2p) <= 1e-9;
    if (!order || equal != (k >= kc)) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " of 9 grid points violate 2f <= 2p <= 1 or the equality pattern"};
}

Outcome uniqueness() {
  // The composite rule resolves the sharp integrands at large q; Gauss-Hermite
  // order 200 is reported alongside for reference.
  const QuadratureRule comp = composite_normal_rule();
  const SolverConfig cfg = default_solver();
  std::string counts, gh_counts;
  bool ok = true;
  for (double k : ref::kFullKappa) {
    const int c = scan_fixed_point([&](double q) { return psi_q(q, k, comp); }, cfg).sign_changes;
    const int g = scan_fixed_point([&](double q) { return psi_q(q, k, gh200()); }, cfg).sign_changes;
    ok &= c == 1;
    counts += std::to_string(c);
    gh_counts += std::to_string(g);
  }
  return {ok, "sign changes on [1e-2, 50] per kappa (composite rule): " + counts +
                  "; Gauss-Hermite 200 for reference: " + gh_counts};
}

Outcome numerics() {
  double moment_worst = 0.0;
  for (int order = 2; order <= 64; ++order) {
    const auto r = gauss_hermite_rule(order);
    for (int k = 0; k <= 2 * order - 1; ++k) {
      const double got = expect_normal([k](double h) { return std::pow(h, k); }, r);
      const long double want = oracle::normal_moment(k);
      const double e = want == 0.0L
                           ? std::fabs(got) / static_cast<double>(oracle::normal_moment(k + 1))
                           : std::fabs(static_cast<double>((got - want) / want));
      moment_worst = std::max(moment_worst, e);
    }
  }
  double erfcx_worst = 0.0;
  for (double x = -26.0; x <= 26.0; x += 0.0031) {
    const double want = static_cast<double>(oracle::erfcx_oracle(x));
    erfcx_worst = std::max(erfcx_worst, std::fabs(erfc_scaled(x) - want) / want);
  }
  const auto r400 = gauss_hermite_rule(400);
  double parts_worst = 0.0;
  for (double q : {0.5, 2.5764, 7.4}) {
    parts_worst = std::max(parts_worst, std::fabs(psi_p(q, r400) - psi_p_by_parts(q, r400)));
  }
  return {moment_worst <= 1e-9 && erfcx_worst <= 1e-12 && parts_worst <= 1e-8,
          fmt("moments rel %.2e (tol 1e-9)", moment_worst) +
              fmt(", erfcx rel %.2e (tol 1e-12)", erfcx_worst) +
              fmt(", psi_p forms %.2e (tol 1e-8)", parts_worst)};
}

Outcome monte_carlo() {
  const auto t0 = Clock::now();
  const int n = 20, trials = 200;
  const std::uint64_t seed = 20240;
  const std::vector<int> ms{8, 12, 16, 20, 24, 30};

  std::vector<std::vector<std::uint8_t>> ex, ls;
  for (int m : ms) {
    ex.push_back(trial_outcomes(n, m, 0.0, trials, McMethod::Exhaustive, seed));
    ls.push_back(trial_outcomes(n, m, 0.0, trials, McMethod::LocalSearch, seed));
  }
  const auto rate = [&](std::size_t i) {
    int s = 0;
    for (auto o : ex[i]) s += o;
    return static_cast<double>(s) / trials;
  };

  // (a) weakly decreasing: no later rate exceeds the upper Wilson bound of an earlier one.
  bool decreasing = true;
  std::string rates;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    int s = 0;
    for (auto o : ex[i]) s += o;
    const double hi = wilson_interval(s, trials).second;
    for (std::size_t j = i + 1; j < ms.size(); ++j) decreasing &= rate(j) <= hi;
    rates += (i ? " " : "") + fmt("%.3f", rate(i));
  }

  // (b) end points, re-derived with the independent enumeration.
  int oracle_mismatch = 0;
  for (std::size_t i : {std::size_t{0}, ms.size() - 1}) {
    for (int t = 0; t < trials; ++t) {
      const auto inst = sample_instance(n, ms[i], 0.0, trial_instance_seed(seed, t));
      oracle_mismatch += oracle::brute_force_feasible(inst) != (ex[i][t] != 0);
    }
  }
  const bool ends = rate(0) > 0.9 && rate(ms.size() - 1) < 0.1 && oracle_mismatch == 0;

  // (c) dominance.
  int dominance = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (int t = 0; t < trials; ++t) dominance += ls[i][t] > ex[i][t];
  }

  // (d) reproducibility.
  bool same = true;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    same &= trial_outcomes(n, ms[i], 0.0, trials, McMethod::Exhaustive, seed) == ex[i];
    same &= trial_outcomes(n, ms[i], 0.0, trials, McMethod::LocalSearch, seed) == ls[i];
  }

  const double t = seconds_since(t0);
  return {decreasing && ends && dominance == 0 && same && t < 300.0,
          "rates " + rates + "; decreasing " + (decreasing ? "yes" : "no") + ", oracle mismatches " +
              std::to_string(oracle_mismatch) + ", local-search outside exhaustive " +
              std::to_string(dominance) + ", reproducible " + (same ? "yes" : "no") +
              fmt(", runtime %.1f s (limit 300 s)", t)};
}

Outcome cli_contract() {
  std::string out;
  const int code = cli_code({"table", "3", "--format", "json"}, &out);
  if (code != 0) return {false, "table 3 exited " + std::to_string(code)};
  const auto rec = OutputRecord::from_json(Json::parse(out));
  const std::vector<double> grid(ref::kProgressionKappa.begin(), ref::kProgressionKappa.end());
  const SolverConfig cfg = default_solver();
  std::size_t idx = 0;
  int mismatches = 0;
  for (LiftLevel lv : {LiftLevel::L1, LiftLevel::L2Partial, LiftLevel::L2Full}) {
    for (const auto& p : capacity_curve(grid, lv, cfg, gh200())) {
      if (idx >= rec.results.size() || !p.ok() ||
          !same_result(capacity_from_json(rec.results[idx]), *p.result)) {
        ++mismatches;
      }
      ++idx;
    }
  }
  const bool sizes = idx == rec.results.size();

  struct Case {
    std::vector<std::string> args;
    int expect;
  };
  const std::vector<Case> cases{
      {{"capacity", "--kappa", "0", "--level", "2f"}, cli::kOk},
      {{"capacity", "--kappa", "0", "--frobnicate"}, cli::kUsage},
      {{"capacity", "--kappa", "5", "--level", "2f"}, cli::kUsage},
      {{"capacity", "--kappa", "5", "--level", "2f", "--allow-extrapolation"}, cli::kConvergence},
      {{"simulate", "--n", "30", "--m", "3"}, cli::kRange},
      {{"threshold", "--n", "6", "--kappa", "-1e6", "--trials", "5"}, cli::kRange},
  };
  std::string codes;
  bool codes_ok = true;
  for (const auto& c : cases) {
    const int got = cli_code(c.args);
    codes_ok &= got == c.expect;
    codes += std::to_string(got);
  }
  return {mismatches == 0 && sizes && codes_ok,
          std::to_string(mismatches) + " of 27 table cells differ from capacity_curve; exit codes " +
              codes + " (expected 011233)"};
}

}  // namespace

int main() {
  report(1, "level-1 golden row", level1_row);
  report(2, "level-2-partial golden row", level2_partial_row);
  report(3, "crossover constant", crossover);
  report(4, "level-2-full golden table", level2_full_table);
  report(5, "headline constant", headline);
  report(6, "level ordering", ordering);
  report(7, "fixed-point uniqueness", uniqueness);
  report(8, "numerics", numerics);
  report(9, "Monte Carlo properties", monte_carlo);
  report(10, "CLI contract", cli_contract);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
