#pragma once

// Monte Carlo feasibility experiments for G x >= kappa 1 over
// x in {-1/sqrt(n), +1/sqrt(n)}^n with i.i.d. standard normal G.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "percap/errors.hpp"

namespace percap {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key);
};

/// Stream keyed by a 64-bit seed; draws are addressed by (a, b, tag) and
/// therefore independent of evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

  Philox4x32::Counter raw(std::uint64_t a, std::uint32_t b, std::uint32_t tag) const;
  /// Two uniforms in (0, 1] with 53 random bits each.
  std::array<double, 2> uniforms(std::uint64_t a, std::uint32_t b, std::uint32_t tag) const;
  /// The index-th standard normal of stream `tag` (Box-Muller, two per block).
  double normal(std::uint64_t index, std::uint32_t tag) const;
  /// A 64-bit value derived from (a, b); used to fan out per-trial seeds.
  std::uint64_t derive(std::uint64_t a, std::uint32_t b) const;

 private:
  std::uint64_t seed_;
};

using SignVector = std::vector<std::int8_t>;

struct FeasibilityInstance {
  int n = 0;
  int m = 0;
  double kappa = 0.0;
  std::vector<double> entries;  // row-major m x n
  std::uint64_t seed = 0;

  std::span<const double> row(int i) const {
    return {entries.data() + static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)};
  }
};

/// Entry (i, j) is the (i*n + j)-th normal of the seed's stream, so the instance
/// with m rows is a row prefix of any instance with more rows and the same seed.
FeasibilityInstance sample_instance(int n, int m, double kappa, std::uint64_t seed);

/// Sum_i max(kappa - (G x)_i / sqrt(n), 0)^2. Zero iff x / sqrt(n) is feasible.
double margin_energy(const FeasibilityInstance& inst, std::span<const std::int8_t> x);

struct FeasibilityResult {
  bool feasible = false;
  std::optional<SignVector> witness;
};

inline constexpr int kDefaultExhaustiveCap = 26;

/// Gray-code enumeration of all 2^n sign vectors with O(m) incremental updates.
FeasibilityResult feasible_exhaustive(const FeasibilityInstance& inst,
                                      int max_n = kDefaultExhaustiveCap);

/// Greedy best-improvement single-flip descent on margin_energy from `restarts`
/// random starts. A true answer is certified; false is inconclusive.
FeasibilityResult feasible_local_search(const FeasibilityInstance& inst, int restarts,
                                        std::uint64_t search_seed);

enum class McMethod { Exhaustive, LocalSearch };

std::string_view to_string(McMethod method);
/// Accepts "exhaustive" and "local" (or "local_search").
McMethod parse_mc_method(std::string_view text);

struct McOptions {
  int restarts = 50;
  int exhaustive_cap = kDefaultExhaustiveCap;
};

struct MCEstimate {
  int n = 0;
  int m = 0;
  double kappa = 0.0;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  McMethod method = McMethod::Exhaustive;
};

/// 95% Wilson score interval for `successes` out of `trials`.
std::pair<double, double> wilson_interval(int successes, int trials);

/// Seed of the instance used by trial `trial`. It depends only on (seed, trial):
/// across m the instances share rows, so each trial's feasibility is monotone in m.
std::uint64_t trial_instance_seed(std::uint64_t seed, int trial);

/// Per-trial outcomes for one m. Entry t is 1 when trial t was found feasible.
std::vector<std::uint8_t> trial_outcomes(int n, int m, double kappa, int trials, McMethod method,
                                         std::uint64_t seed, const McOptions& opts = {});

std::vector<MCEstimate> estimate_feasibility(int n, const std::vector<int>& m_grid, double kappa,
                                             int trials, McMethod method, std::uint64_t seed,
                                             const McOptions& opts = {});

struct ThresholdConfig {
  int m_min = 1;
  int m_max = 0;  // 0 means 3n
  McOptions mc;
};

struct ThresholdEstimate {
  double alpha_hat = 0.0;    // m* / n
  double m_star = 0.0;
  double uncertainty = 0.0;  // in alpha units, from the Wilson intervals at the crossing
  std::vector<MCEstimate> curve;
};

/// Scans m upward from cfg.m_min and linearly interpolates the first crossing
/// of rate 0.5. Throws RangeError with the observed curve if there is none.
ThresholdEstimate empirical_threshold(int n, double kappa, int trials, McMethod method,
                                      std::uint64_t seed, const ThresholdConfig& cfg = {});

}  // namespace percap
