#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace percap {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An integrand or map produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double at)
      : Error(what), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

/// The supplied bracket does not contain a sign change.
class BracketError : public Error {
 public:
  BracketError(double lo, double hi, double g_lo, double g_hi);
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double g_lo() const noexcept { return g_lo_; }
  double g_hi() const noexcept { return g_hi_; }

 private:
  double lo_, hi_, g_lo_, g_hi_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_iterate)
      : Error(what), last_(last_iterate) {}
  double last_iterate() const noexcept { return last_; }

 private:
  double last_;
};

/// psi_p left the open interval (0, 1); the L2-full functionals are undefined there.
class DegenerateOrderParameter : public Error {
 public:
  DegenerateOrderParameter(const std::string& what, double p2)
      : Error(what), p2_(p2) {}
  double p2() const noexcept { return p2_; }

 private:
  double p2_;
};

/// Exhaustive enumeration requested above the configured dimension cap.
class CapacityCapError : public Error {
 public:
  using Error::Error;
};

/// An empirical rate curve never crossed the requested level.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, std::vector<std::pair<int, double>> curve)
      : Error(what), curve_(std::move(curve)) {}
  /// Observed (m, rate) pairs.
  const std::vector<std::pair<int, double>>& curve() const noexcept { return curve_; }

 private:
  std::vector<std::pair<int, double>> curve_;
};

}  // namespace percap
