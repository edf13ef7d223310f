#include "percap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace percap {

BracketError::BracketError(double lo, double hi, double g_lo, double g_hi)
    : Error([&] {
        std::ostringstream os;
        os << "no sign change on [" << lo << ", " << hi << "]: g(lo) = " << g_lo
           << ", g(hi) = " << g_hi;
        return os.str();
      }()),
      lo_(lo),
      hi_(hi),
      g_lo_(g_lo),
      g_hi_(g_hi) {}

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0)) throw InvalidArgument("SolverConfig: abs_tol must be > 0");
  if (!(bracket_lo < bracket_hi)) {
    throw InvalidArgument("SolverConfig: bracket_lo must be < bracket_hi");
  }
  if (max_iter < 1) throw InvalidArgument("SolverConfig: max_iter must be >= 1");
  if (scan_points < 2) throw InvalidArgument("SolverConfig: scan_points must be >= 2");
}

double brent_root(const ScalarFn& g, const SolverConfig& cfg, int* iterations) {
  cfg.validate();
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double a = cfg.bracket_lo;
  double b = cfg.bracket_hi;
  double fa = g(a);
  double fb = g(b);
  if (!std::isfinite(fa)) throw EvaluationError("brent_root: g(lo) not finite", a);
  if (!std::isfinite(fb)) throw EvaluationError("brent_root: g(hi) not finite", b);
  if (iterations) *iterations = 0;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw BracketError(a, b, fa, fb);

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    // b is the best estimate; the root stays between b and c.
    const double tol = 2.0 * eps * std::fabs(b);
    const double half = 0.5 * (c - b);
    if (std::fabs(fb) <= cfg.abs_tol || fb == 0.0 || std::fabs(half) <= tol) {
      if (iterations) *iterations = it - 1;
      return b;
    }
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points are distinct.
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * half * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (half > 0.0 ? tol : -tol);
    fb = g(b);
    if (!std::isfinite(fb)) throw EvaluationError("brent_root: g not finite", b);
  }
  throw ConvergenceError("brent_root: max_iter (" + std::to_string(cfg.max_iter) +
                             ") exceeded",
                         b);
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(lo < hi) || points < 2) {
    throw InvalidArgument("geometric_grid: need 0 < lo < hi and points >= 2");
  }
  std::vector<double> grid(points);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < points; ++i) {
    grid[i] = lo * std::exp(ratio * i / (points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ScanResult scan_fixed_point(const ScalarFn& psi, const SolverConfig& cfg) {
  cfg.validate();
  ScanResult scan;
  scan.grid = geometric_grid(cfg.bracket_lo, cfg.bracket_hi, cfg.scan_points);
  scan.residuals.reserve(scan.grid.size());
  for (double q : scan.grid) {
    const double v = psi(q);
    if (!std::isfinite(v)) {
      throw EvaluationError("fixed-point map not finite at q = " + std::to_string(q), q);
    }
    scan.residuals.push_back(q - v);
  }
  // Exact zeros count once; a cell [i, i+1] changes sign when the signs differ.
  for (std::size_t i = 0; i + 1 < scan.residuals.size(); ++i) {
    const double r0 = scan.residuals[i];
    const double r1 = scan.residuals[i + 1];
    const bool change = (r0 < 0.0 && r1 >= 0.0) || (r0 > 0.0 && r1 <= 0.0) ||
                        (i == 0 && r0 == 0.0);
    if (change) {
      ++scan.sign_changes;
      if (scan.first_change < 0) scan.first_change = static_cast<int>(i);
    }
  }
  return scan;
}

FixedPointState solve_fixed_point(const ScalarFn& psi, const SolverConfig& cfg) {
  const ScanResult scan = scan_fixed_point(psi, cfg);
  FixedPointState state;
  state.sign_changes = scan.sign_changes;

  if (scan.first_change < 0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scan.residuals.size(); ++i) {
      if (std::fabs(scan.residuals[i]) < std::fabs(scan.residuals[best])) best = i;
    }
    state.q2s = scan.grid[best];
    state.residual = std::fabs(scan.residuals[best]);
    state.converged = false;
    return state;
  }

  SolverConfig cell = cfg;
  cell.bracket_lo = scan.grid[scan.first_change];
  cell.bracket_hi = scan.grid[scan.first_change + 1];
  const auto g = [&](double q) { return q - psi(q); };
  int iters = 0;
  const double root = brent_root(g, cell, &iters);
  state.q2s = root;
  state.residual = std::fabs(g(root));
  state.iterations = iters;
  state.converged = state.residual <= cfg.abs_tol;
  return state;
}

}  // namespace percap
