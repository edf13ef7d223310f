#pragma once

// Capacity evaluators for the binary +-1 perceptron at lifting levels 1,
// 2-partial and 2-full.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "percap/solver.hpp"
#include "percap/special.hpp"

namespace percap {

enum class LiftLevel { L1, L2Partial, L2Full };

/// "1", "2p", "2f".
std::string_view to_string(LiftLevel level);
/// Inverse of to_string; throws InvalidArgument on anything else.
LiftLevel parse_lift_level(std::string_view text);

/// Order-parameter sequences p_0..p_{r+1}, q_0..q_{r+1}, c_0..c_{r+1} and the
/// square-root-trick scale gamma_sq.
struct LiftingParams {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> c;
  double gamma_sq = 0.0;

  /// p and q non-increasing in [0, 1] from 1 down to 0, equal lengths, gamma_sq >= 0.
  void validate() const;
  /// sqrt(p_{k-1} - p_k), k >= 1.
  double b_at(std::size_t k) const;
  /// sqrt(q_{k-1} - q_k), k >= 1.
  double c_from_q(std::size_t k) const;
};

/// Validated kappa range for L2Full results.
inline constexpr double kValidatedKappaMin = -1.0;
inline constexpr double kValidatedKappaMax = 2.0;

struct CapacityResult {
  double kappa = 0.0;
  LiftLevel level = LiftLevel::L1;
  double alpha_c = 0.0;
  std::optional<double> p2;
  std::optional<double> q2s;
  std::optional<double> gamma_sq;
  double residual = 0.0;
  int iterations = 0;
  int quadrature_order = 0;

  // diagnostics
  bool validated = true;         // kappa inside [kValidatedKappaMin, kValidatedKappaMax]
  bool collapsed_to_l1 = false;  // L2Partial at kappa >= kappa_c
  int sign_changes = 0;          // L2Full scan multiplicity
};

/// E max(kappa + u, 0)^2 for u ~ N(0, 1), closed form.
double e_max_sq(double kappa);

/// Level-1 capacity 2 / (pi E max(kappa + u, 0)^2), with gamma_sq in closed form.
CapacityResult capacity_l1(double kappa);

/// Bracket and tolerances used for the partial-level crossover by default.
SolverConfig kappa_c_config();

/// L1 capacity minus the uncollapsed 2-partial branch -log 2 / log(erfc(kappa/sqrt 2)/2).
/// Positive below the crossover, negative above it.
double crossover_difference(double kappa);

/// The threshold where the two 2-partial branches meet (about 0.602957).
double kappa_c(const SolverConfig& cfg = kappa_c_config());

/// Piecewise 2-partial capacity. `cfg` governs the kappa_c solve.
CapacityResult capacity_l2_partial(double kappa, const SolverConfig& cfg = kappa_c_config());

/// E tanh^2(sqrt(q2s) h). Throws InvalidArgument for q2s < 0.
double psi_p(double q2s, const QuadratureRule& rule);

/// 1 - E (h / sqrt(q2s)) tanh(sqrt(q2s) h): the form before Gaussian
/// integration by parts. Equal to psi_p under exact integration.
double psi_p_by_parts(double q2s, const QuadratureRule& rule);

/// Capacity functional of the 2-full level at a given q2s.
/// Throws DegenerateOrderParameter if psi_p(q2s) is not inside (0, 1).
double psi_alpha(double q2s, double kappa, const QuadratureRule& rule);

/// The right-hand side of the q2s stationarity condition.
double psi_q(double q2s, double kappa, const QuadratureRule& rule);

/// Fixed point q2s = psi_q(q2s) and alpha_c = psi_alpha(q2s). gamma_sq is the
/// limiting value 0. Throws ConvergenceError when the scan finds no sign change.
CapacityResult capacity_l2_full(double kappa, const SolverConfig& cfg,
                                const QuadratureRule& rule);

/// Dispatch on `level`. `cfg` is the L2Full fixed-point configuration; the
/// L2Partial crossover uses kappa_c_config() with cfg's tolerance and iteration cap.
CapacityResult capacity(double kappa, LiftLevel level, const SolverConfig& cfg,
                        const QuadratureRule& rule);

/// One entry per grid point; a failed point keeps its error message instead of a result.
struct CurvePoint {
  double kappa = 0.0;
  std::optional<CapacityResult> result;
  std::string error;
  bool ok() const noexcept { return result.has_value(); }
};

/// Evaluates `capacity` at every grid point, possibly in parallel. Order preserved.
std::vector<CurvePoint> capacity_curve(const std::vector<double>& kappa_grid, LiftLevel level,
                                       const SolverConfig& cfg, const QuadratureRule& rule);

}  // namespace percap
