#include "percap/lifting.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "percap/parallel.hpp"

namespace percap {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
constexpr double kDegenerateMargin = 1e-12;

void require_finite_kappa(double kappa, const char* where) {
  if (!std::isfinite(kappa)) {
    throw InvalidArgument(std::string(where) + ": kappa must be finite");
  }
}

// psi_p together with the guard shared by psi_alpha and psi_q.
double checked_p2(double q2s, const QuadratureRule& rule) {
  const double p = psi_p(q2s, rule);
  if (!(p > 0.0) || p > 1.0 - kDegenerateMargin) {
    std::ostringstream os;
    os << "psi_p(" << q2s << ") = " << p << " is outside (0, 1)";
    throw DegenerateOrderParameter(os.str(), p);
  }
  return p;
}

// Argument of the erfc terms: (sqrt(p) u + kappa) / (sqrt 2 sqrt(1 - p)).
struct TailArgument {
  double sqrt_p;
  double kappa;
  double inv_scale;
  double operator()(double u) const { return (sqrt_p * u + kappa) * inv_scale; }
};

TailArgument tail_argument(double p, double kappa) {
  return {std::sqrt(p), kappa, 1.0 / (kSqrt2 * std::sqrt(1.0 - p))};
}

double psi_alpha_given_p(double q2s, double p, double kappa, const QuadratureRule& rule) {
  const double sq = std::sqrt(q2s);
  const double log_cosh =
      expect_normal([sq](double h) { return log_two_cosh(sq * h); }, rule);
  const double numerator = 0.5 * (1.0 - p) * q2s - log_cosh;
  const TailArgument z = tail_argument(p, kappa);
  const double denominator =
      expect_normal([&z](double u) { return log_half_erfc(z(u)); }, rule);
  return numerator / denominator;
}

}  // namespace

std::string_view to_string(LiftLevel level) {
  switch (level) {
    case LiftLevel::L1:
      return "1";
    case LiftLevel::L2Partial:
      return "2p";
    case LiftLevel::L2Full:
      return "2f";
  }
  return "?";
}

LiftLevel parse_lift_level(std::string_view text) {
  if (text == "1") return LiftLevel::L1;
  if (text == "2p") return LiftLevel::L2Partial;
  if (text == "2f") return LiftLevel::L2Full;
  throw InvalidArgument("unknown lifting level '" + std::string(text) +
                        "' (expected 1, 2p or 2f)");
}

void LiftingParams::validate() const {
  if (p.size() < 2 || q.size() != p.size() || c.size() != p.size()) {
    throw InvalidArgument("LiftingParams: p, q, c must have equal length >= 2");
  }
  const auto check = [](const std::vector<double>& v, const char* name) {
    if (v.front() != 1.0 || v.back() != 0.0) {
      throw InvalidArgument(std::string("LiftingParams: ") + name +
                            " must start at 1 and end at 0");
    }
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (!(v[k] <= v[k - 1]) || v[k] < 0.0) {
        throw InvalidArgument(std::string("LiftingParams: ") + name +
                              " must be non-increasing in [0, 1]");
      }
    }
  };
  check(p, "p");
  check(q, "q");
  if (!(gamma_sq >= 0.0)) throw InvalidArgument("LiftingParams: gamma_sq must be >= 0");
}

double LiftingParams::b_at(std::size_t k) const {
  if (k == 0 || k >= p.size()) throw InvalidArgument("LiftingParams::b_at: index out of range");
  return std::sqrt(p[k - 1] - p[k]);
}

double LiftingParams::c_from_q(std::size_t k) const {
  if (k == 0 || k >= q.size()) {
    throw InvalidArgument("LiftingParams::c_from_q: index out of range");
  }
  return std::sqrt(q[k - 1] - q[k]);
}

double e_max_sq(double kappa) {
  require_finite_kappa(kappa, "e_max_sq");
  const double gauss = kappa * std::exp(-0.5 * kappa * kappa) / std::sqrt(2.0 * std::numbers::pi);
  return gauss + 0.5 * (kappa * kappa + 1.0) * std::erfc(-kappa / kSqrt2);
}

CapacityResult capacity_l1(double kappa) {
  const double e = e_max_sq(kappa);
  CapacityResult r;
  r.kappa = kappa;
  r.level = LiftLevel::L1;
  r.alpha_c = 2.0 / (std::numbers::pi * e);
  r.gamma_sq = 0.5 * std::sqrt(r.alpha_c) * std::sqrt(e);
  r.validated = kappa >= kValidatedKappaMin && kappa <= kValidatedKappaMax;
  return r;
}

SolverConfig kappa_c_config() {
  SolverConfig cfg;
  cfg.bracket_lo = 0.3;
  cfg.bracket_hi = 0.9;
  return cfg;
}

double crossover_difference(double kappa) {
  const double partial = -std::numbers::ln2 / log_half_erfc(kappa / kSqrt2);
  return capacity_l1(kappa).alpha_c - partial;
}

double kappa_c(const SolverConfig& cfg) {
  return brent_root(crossover_difference, cfg);
}

CapacityResult capacity_l2_partial(double kappa, const SolverConfig& cfg) {
  require_finite_kappa(kappa, "capacity_l2_partial");
  if (kappa >= kappa_c(cfg)) {
    CapacityResult r = capacity_l1(kappa);
    r.level = LiftLevel::L2Partial;
    r.collapsed_to_l1 = true;
    return r;
  }
  CapacityResult r;
  r.kappa = kappa;
  r.level = LiftLevel::L2Partial;
  r.alpha_c = -std::numbers::ln2 / log_half_erfc(kappa / kSqrt2);
  r.p2 = 0.0;
  r.q2s = 0.0;
  r.gamma_sq = 0.0;
  r.validated = kappa >= kValidatedKappaMin && kappa <= kValidatedKappaMax;
  return r;
}

double psi_p(double q2s, const QuadratureRule& rule) {
  if (!(q2s >= 0.0)) throw InvalidArgument("psi_p: q2s must be >= 0");
  if (q2s == 0.0) return 0.0;
  const double sq = std::sqrt(q2s);
  return expect_normal(
      [sq](double h) {
        const double t = std::tanh(sq * h);
        return t * t;
      },
      rule);
}

double psi_p_by_parts(double q2s, const QuadratureRule& rule) {
  if (!(q2s > 0.0)) throw InvalidArgument("psi_p_by_parts: q2s must be > 0");
  const double sq = std::sqrt(q2s);
  return 1.0 - expect_normal([sq](double h) { return h / sq * std::tanh(sq * h); }, rule);
}

double psi_alpha(double q2s, double kappa, const QuadratureRule& rule) {
  require_finite_kappa(kappa, "psi_alpha");
  const double p = checked_p2(q2s, rule);
  return psi_alpha_given_p(q2s, p, kappa, rule);
}

double psi_q(double q2s, double kappa, const QuadratureRule& rule) {
  require_finite_kappa(kappa, "psi_q");
  const double p = checked_p2(q2s, rule);
  const double alpha = psi_alpha_given_p(q2s, p, kappa, rule);
  const double sqrt_p = std::sqrt(p);
  const double one_minus = 1.0 - p;
  const double scale = 1.0 / (sqrt_p * one_minus * std::sqrt(one_minus));
  const TailArgument z = tail_argument(p, kappa);
  // exp(-z^2) / erfc(z) = 1 / erfcx(z); 1/inf -> 0 deep in the left tail.
  const double mean = expect_normal(
      [&](double u) { return kSqrt2OverPi / erfc_scaled(z(u)) * (u + sqrt_p * kappa) * scale; },
      rule);
  return alpha * mean;
}

CapacityResult capacity_l2_full(double kappa, const SolverConfig& cfg,
                                const QuadratureRule& rule) {
  require_finite_kappa(kappa, "capacity_l2_full");
  const FixedPointState state =
      solve_fixed_point([&](double q) { return psi_q(q, kappa, rule); }, cfg);
  if (!state.converged) {
    std::ostringstream os;
    os << "no fixed point of psi_q on [" << cfg.bracket_lo << ", " << cfg.bracket_hi
       << "] at kappa = " << kappa << " (sign changes: " << state.sign_changes
       << ", best q = " << state.q2s << ", residual = " << state.residual << ")";
    throw ConvergenceError(os.str(), state.q2s);
  }
  CapacityResult r;
  r.kappa = kappa;
  r.level = LiftLevel::L2Full;
  r.q2s = state.q2s;
  r.p2 = checked_p2(state.q2s, rule);
  r.alpha_c = psi_alpha_given_p(state.q2s, *r.p2, kappa, rule);
  r.gamma_sq = 0.0;
  r.residual = state.residual;
  r.iterations = state.iterations;
  r.quadrature_order = rule.order;
  r.validated = kappa >= kValidatedKappaMin && kappa <= kValidatedKappaMax;
  r.sign_changes = state.sign_changes;
  return r;
}

CapacityResult capacity(double kappa, LiftLevel level, const SolverConfig& cfg,
                        const QuadratureRule& rule) {
  switch (level) {
    case LiftLevel::L1:
      return capacity_l1(kappa);
    case LiftLevel::L2Partial: {
      SolverConfig crossover = kappa_c_config();
      crossover.abs_tol = cfg.abs_tol;
      crossover.max_iter = cfg.max_iter;
      return capacity_l2_partial(kappa, crossover);
    }
    case LiftLevel::L2Full:
      return capacity_l2_full(kappa, cfg, rule);
  }
  throw InvalidArgument("capacity: unknown level");
}

std::vector<CurvePoint> capacity_curve(const std::vector<double>& kappa_grid, LiftLevel level,
                                       const SolverConfig& cfg, const QuadratureRule& rule) {
  if (kappa_grid.empty()) throw InvalidArgument("capacity_curve: empty grid");
  std::vector<CurvePoint> points(kappa_grid.size());
  parallel_for(kappa_grid.size(), [&](std::size_t i) {
    points[i].kappa = kappa_grid[i];
    try {
      points[i].result = capacity(kappa_grid[i], level, cfg, rule);
    } catch (const Error& e) {
      points[i].error = e.what();
    }
  });
  return points;
}

}  // namespace percap
