#pragma once

// Special functions and Gaussian quadrature for expectations over a
// standard normal scalar.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "percap/errors.hpp"

namespace percap {

/// Nodes and weights realizing E f(h) for h ~ N(0, 1).
///
/// Weights are probability masses (they sum to one) and the node set is
/// symmetric about zero. Nodes whose weight underflows double precision are
/// dropped, so `size()` can be smaller than `order` for very large orders.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
  std::string family;  // "hermite" or "composite"

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Hermite rule in the probabilists' convention. Exact for polynomials of
/// degree <= 2*order - 1 against the standard normal density.
///
/// Nodes come from the Golub-Welsch eigenvalues of the Hermite Jacobi matrix,
/// then get a Newton polish on the orthonormal three-term recurrence; weights
/// use the Christoffel formula 1 / (n * phi_{n-1}(x)^2) evaluated in log space.
QuadratureRule gauss_hermite_rule(int order);

/// Composite Gauss-Legendre rule on [-cutoff, cutoff] with the normal density
/// folded into the weights. Resolves integrands that vary on scales much
/// finer than one standard deviation, where Gauss-Hermite converges slowly.
QuadratureRule composite_normal_rule(int panels = 240, int points_per_panel = 10,
                                     double cutoff = 12.0);

/// erfcx(x) = exp(x^2) * erfc(x), bounded for x >= 0.
double erfc_scaled(double x);

/// log(erfc(x) / 2) without underflow for large positive x.
double log_half_erfc(double x);

/// log(2 cosh(x)) = |x| + log1p(exp(-2|x|)).
inline double log_two_cosh(double x) {
  const double a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

/// Sum_i w_i f(x_i). Throws EvaluationError naming the node if f is not finite there.
template <class F>
double expect_normal(F&& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw EvaluationError("integrand not finite at node " + std::to_string(i) +
                                " (x = " + std::to_string(rule.nodes[i]) + ")",
                            rule.nodes[i]);
    }
    acc += rule.weights[i] * v;
  }
  return acc;
}

}  // namespace percap
