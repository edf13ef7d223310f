#include "percap/special.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace percap {

namespace {

struct RecurrenceValue {
  double top;        // phi_n(x) / scale
  double below;      // phi_{n-1}(x) / scale
  double log_scale;  // log of the common scale factor
};

// Orthonormal probabilists' Hermite polynomials:
//   phi_{k+1} = (x phi_k - sqrt(k) phi_{k-1}) / sqrt(k+1),  phi_0 = 1.
// The pair is renormalized whenever it grows large; ratios stay exact.
RecurrenceValue hermite_recurrence(int n, double x) {
  constexpr double kBig = 1e150;
  double prev = 0.0;
  double cur = 1.0;
  double log_scale = 0.0;
  for (int k = 0; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    if (std::fabs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += std::log(kBig);
    }
  }
  return {cur, prev, log_scale};
}

// Legendre P_n and P_n' at t, for Gauss-Legendre nodes on [-1, 1].
std::pair<double, double> legendre(int n, double t) {
  double p0 = 1.0;
  double p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (t * p1 - p0) / (t * t - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 2) {
    throw InvalidArgument("gauss_hermite_rule: order must be >= 2, got " +
                          std::to_string(order));
  }
  const int n = order;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error("gauss_hermite_rule: tridiagonal eigensolver failed");
  }
  std::vector<double> guesses(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  std::sort(guesses.begin(), guesses.end());

  // Positive half (plus zero for odd n), polished and weighted, then mirrored.
  std::vector<double> half_nodes;
  std::vector<double> half_weights;
  const int first = n / 2;
  for (int i = first; i < n; ++i) {
    double x = (n % 2 == 1 && i == first) ? 0.0 : guesses[i];
    if (x != 0.0) {
      for (int it = 0; it < 20; ++it) {
        const auto r = hermite_recurrence(n, x);
        const double dx = r.top / (std::sqrt(static_cast<double>(n)) * r.below);
        x -= dx;
        if (std::fabs(dx) <= 1e-15 * std::max(1.0, std::fabs(x))) break;
      }
    }
    const auto r = hermite_recurrence(n - 1, x);
    const double log_phi = std::log(std::fabs(r.top)) + r.log_scale;
    const double w = std::exp(-std::log(static_cast<double>(n)) - 2.0 * log_phi);
    if (w > 0.0) {
      half_nodes.push_back(x);
      half_weights.push_back(w);
    }
  }

  QuadratureRule rule;
  rule.order = order;
  rule.family = "hermite";
  const bool has_zero = !half_nodes.empty() && half_nodes.front() == 0.0;
  for (std::size_t i = half_nodes.size(); i-- > (has_zero ? 1u : 0u);) {
    rule.nodes.push_back(-half_nodes[i]);
    rule.weights.push_back(half_weights[i]);
  }
  for (std::size_t i = 0; i < half_nodes.size(); ++i) {
    rule.nodes.push_back(half_nodes[i]);
    rule.weights.push_back(half_weights[i]);
  }
  return rule;
}

QuadratureRule composite_normal_rule(int panels, int points_per_panel, double cutoff) {
  if (panels < 2 || panels % 2 != 0) {
    throw InvalidArgument("composite_normal_rule: panels must be even and >= 2");
  }
  if (points_per_panel < 1) {
    throw InvalidArgument("composite_normal_rule: points_per_panel must be >= 1");
  }
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw InvalidArgument("composite_normal_rule: cutoff must be positive and finite");
  }

  // Gauss-Legendre on [-1, 1].
  const int g = points_per_panel;
  std::vector<double> t(g), tw(g);
  for (int i = 0; i < g; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (g + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(g, x);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) <= 1e-16) break;
    }
    const auto [p, dp] = legendre(g, x);
    (void)p;
    t[i] = x;
    tw[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (g == 1) {
    t[0] = 0.0;
    tw[0] = 2.0;
  }

  const double width = 2.0 * cutoff / panels;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> pos_nodes, pos_weights;
  for (int k = 0; k < panels / 2; ++k) {
    const double center = (k + 0.5) * width;
    for (int i = 0; i < g; ++i) {
      const double x = center + 0.5 * width * t[i];
      pos_nodes.push_back(x);
      pos_weights.push_back(0.5 * width * tw[i] * inv_sqrt_2pi * std::exp(-0.5 * x * x));
    }
  }
  std::vector<std::size_t> idx(pos_nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return pos_nodes[a] < pos_nodes[b]; });

  QuadratureRule rule;
  rule.family = "composite";
  for (std::size_t j = idx.size(); j-- > 0;) {
    rule.nodes.push_back(-pos_nodes[idx[j]]);
    rule.weights.push_back(pos_weights[idx[j]]);
  }
  for (std::size_t j = 0; j < idx.size(); ++j) {
    rule.nodes.push_back(pos_nodes[idx[j]]);
    rule.weights.push_back(pos_weights[idx[j]]);
  }
  rule.order = static_cast<int>(rule.nodes.size());
  return rule;
}

namespace {

// exp(x^2) with x^2 split so the large part is exact.
double exp_square(double x) {
  const double head = std::trunc(x * 16.0) / 16.0;
  const double del = (x - head) * (x + head);
  return std::exp(head * head) * std::exp(del);
}

// Cody's near-minimax rational approximations for erfcx on y > 0.46875.
double erfcx_cody_tail(double y) {
  static constexpr double c[9] = {
      5.64188496988670089e-1, 8.88314979438837594e0, 6.61191906371416295e1,
      2.98635138197400131e2,  8.81952221241769090e2, 1.71204761263407058e3,
      2.05107837782607147e3,  1.23033935479799725e3, 2.15311535474403846e-8};
  static constexpr double d[8] = {
      1.57449261107098347e1, 1.17693950891312499e2, 5.37181101862009858e2,
      1.62138957456669019e3, 3.29079923573345963e3, 4.36261909014324716e3,
      3.43936767414372164e3, 1.23033935480374942e3};
  static constexpr double p[6] = {
      3.05326634961232344e-1, 3.60344899949804439e-1, 1.25781726111229246e-1,
      1.60837851487422766e-2, 6.58749161529837803e-4, 1.63153871373020978e-2};
  static constexpr double q[5] = {
      2.56852019228982242e0, 1.87295284992346047e0, 5.27905102951428412e-1,
      6.05183413124413191e-2, 2.33520497626869185e-3};
  constexpr double inv_sqrt_pi = 0.56418958354775628695;
  constexpr double huge = 6.71e7;

  if (y <= 4.0) {
    double num = c[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + c[i]) * y;
      den = (den + d[i]) * y;
    }
    return (num + c[7]) / (den + d[7]);
  }
  if (y >= huge) return inv_sqrt_pi / y;
  const double ysq = 1.0 / (y * y);
  double num = p[5] * ysq;
  double den = ysq;
  for (int i = 0; i < 4; ++i) {
    num = (num + p[i]) * ysq;
    den = (den + q[i]) * ysq;
  }
  const double r = ysq * (num + p[4]) / (den + q[4]);
  return (inv_sqrt_pi - r) / y;
}

constexpr double kSplit = 0.46875;

}  // namespace

double erfc_scaled(double x) {
  const double y = std::fabs(x);
  if (y <= kSplit) return std::exp(x * x) * std::erfc(x);
  if (x > 0.0) return erfcx_cody_tail(y);
  // Reflection: erfcx(-y) = 2 exp(y^2) - erfcx(y); overflows to +inf below about -26.6.
  return 2.0 * exp_square(y) - erfcx_cody_tail(y);
}

double log_half_erfc(double x) {
  if (x > 0.0) return -x * x + std::log(erfc_scaled(x)) - std::numbers::ln2;
  return std::log1p(-0.5 * std::erfc(-x));
}

}  // namespace percap
