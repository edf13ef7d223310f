#pragma once

// Bracketed scalar root finding and the scan-then-bracket fixed point solver.

#include <functional>
#include <vector>

#include "percap/errors.hpp"

namespace percap {

struct SolverConfig {
  double abs_tol = 1e-10;
  int max_iter = 200;
  double bracket_lo = 1e-2;
  double bracket_hi = 50.0;
  int scan_points = 64;  // geometric grid used by solve_fixed_point

  /// Throws InvalidArgument unless abs_tol > 0, lo < hi, max_iter >= 1, scan_points >= 2.
  void validate() const;
};

struct FixedPointState {
  double q2s = 0.0;
  double residual = 0.0;  // |q2s - psi(q2s)|
  int iterations = 0;     // root-finder iterations after the scan
  bool converged = false;
  int sign_changes = 0;   // sign changes of q - psi(q) seen on the scan grid
};

/// Residual q - psi(q) sampled on the geometric scan grid.
struct ScanResult {
  std::vector<double> grid;
  std::vector<double> residuals;
  int sign_changes = 0;
  int first_change = -1;  // index i such that the root lies in [grid[i], grid[i+1]]
};

using ScalarFn = std::function<double(double)>;

/// Brent's method on [cfg.bracket_lo, cfg.bracket_hi]. Stops once |g(x)| <= abs_tol
/// or the bracket has collapsed to floating-point resolution.
/// `iterations`, when non-null, receives the number of iterations taken.
double brent_root(const ScalarFn& g, const SolverConfig& cfg, int* iterations = nullptr);

/// `cfg.scan_points` points spaced geometrically over [bracket_lo, bracket_hi].
std::vector<double> geometric_grid(double lo, double hi, int points);

/// Samples q - psi(q) over the scan grid and counts sign changes.
/// Throws EvaluationError if psi is non-finite at a grid point.
ScanResult scan_fixed_point(const ScalarFn& psi, const SolverConfig& cfg);

/// Root of q - psi(q): scan, then Brent on the first sign-changing cell.
/// Returns converged = false (with the best scan point) when no cell changes sign.
FixedPointState solve_fixed_point(const ScalarFn& psi, const SolverConfig& cfg);

}  // namespace percap
