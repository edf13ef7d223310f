#include "percap/mc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "percap/parallel.hpp"

namespace percap {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// Stream tags.
constexpr std::uint32_t kTagNormals = 1;
constexpr std::uint32_t kTagSigns = 2;
constexpr std::uint32_t kTagDerive = 3;

// Derive() sub-streams.
constexpr std::uint32_t kDeriveInstance = 1;
constexpr std::uint32_t kDeriveSearch = 0x10000;

void require_dimensions(int n, int m) {
  if (n < 1 || m < 1) {
    throw InvalidArgument("instance dimensions must satisfy n >= 1 and m >= 1");
  }
}

// Feasibility of row sums s against threshold thr.
bool all_at_least(const std::vector<double>& s, double thr) {
  bool ok = true;
  for (double v : s) ok &= (v >= thr);
  return ok;
}

bool certified(const FeasibilityInstance& inst, const SignVector& x) {
  return margin_energy(inst, x) == 0.0;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

Philox4x32::Counter CounterRng::raw(std::uint64_t a, std::uint32_t b, std::uint32_t tag) const {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(a),
                                   static_cast<std::uint32_t>(a >> 32), b, tag};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  return Philox4x32::block(ctr, key);
}

std::array<double, 2> CounterRng::uniforms(std::uint64_t a, std::uint32_t b,
                                           std::uint32_t tag) const {
  const auto w = raw(a, b, tag);
  const std::uint64_t x = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
  const std::uint64_t y = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return {static_cast<double>((x >> 11) + 1) * scale, static_cast<double>((y >> 11) + 1) * scale};
}

double CounterRng::normal(std::uint64_t index, std::uint32_t tag) const {
  const auto [u1, u2] = uniforms(index / 2, 0, tag);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return (index % 2 == 0) ? r * std::cos(theta) : r * std::sin(theta);
}

std::uint64_t CounterRng::derive(std::uint64_t a, std::uint32_t b) const {
  const auto w = raw(a, b, kTagDerive);
  return (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
}

FeasibilityInstance sample_instance(int n, int m, double kappa, std::uint64_t seed) {
  require_dimensions(n, m);
  FeasibilityInstance inst;
  inst.n = n;
  inst.m = m;
  inst.kappa = kappa;
  inst.seed = seed;
  const CounterRng rng(seed);
  const std::size_t count = static_cast<std::size_t>(n) * m;
  inst.entries.resize(count);
  for (std::size_t k = 0; k < count; k += 2) {
    const auto [u1, u2] = rng.uniforms(k / 2, 0, kTagNormals);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    inst.entries[k] = r * std::cos(theta);
    if (k + 1 < count) inst.entries[k + 1] = r * std::sin(theta);
  }
  return inst;
}

double margin_energy(const FeasibilityInstance& inst, std::span<const std::int8_t> x) {
  if (x.size() != static_cast<std::size_t>(inst.n)) {
    throw InvalidArgument("margin_energy: sign vector has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(inst.n));
  }
  for (std::int8_t v : x) {
    if (v != 1 && v != -1) throw InvalidArgument("margin_energy: entries must be +1 or -1");
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(inst.n));
  double energy = 0.0;
  for (int i = 0; i < inst.m; ++i) {
    const auto g = inst.row(i);
    double dot = 0.0;
    for (int j = 0; j < inst.n; ++j) dot += g[j] * x[j];
    const double gap = inst.kappa - dot * inv_sqrt_n;
    if (gap > 0.0) energy += gap * gap;
  }
  return energy;
}

FeasibilityResult feasible_exhaustive(const FeasibilityInstance& inst, int max_n) {
  if (inst.n > max_n) {
    throw CapacityCapError("exhaustive enumeration capped at n = " + std::to_string(max_n) +
                           ", got n = " + std::to_string(inst.n));
  }
  if (inst.n > 62) throw CapacityCapError("exhaustive enumeration: n too large");
  const int n = inst.n;
  const int m = inst.m;
  const double thr = inst.kappa * std::sqrt(static_cast<double>(n));

  std::vector<double> cols(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j) * m + i] = inst.entries[i * n + j];
  }
  SignVector x(n, 1);
  std::vector<double> s(m);
  const auto recompute = [&] {
    for (int i = 0; i < m; ++i) {
      const auto g = inst.row(i);
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += g[j] * x[j];
      s[i] = dot;
    }
  };
  recompute();
  if (all_at_least(s, thr) && certified(inst, x)) return {true, x};

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int j = std::countr_zero(k);
    const double step = x[j] > 0 ? -2.0 : 2.0;
    x[j] = static_cast<std::int8_t>(-x[j]);
    const double* col = cols.data() + static_cast<std::size_t>(j) * m;
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      s[i] += step * col[i];
      ok &= (s[i] >= thr);
    }
    // Bound the drift of the incremental sums.
    if ((k & 0xFFFF) == 0) {
      recompute();
      ok = all_at_least(s, thr);
    }
    if (ok && certified(inst, x)) return {true, x};
  }
  return {false, std::nullopt};
}

FeasibilityResult feasible_local_search(const FeasibilityInstance& inst, int restarts,
                                        std::uint64_t search_seed) {
  if (restarts < 1) throw InvalidArgument("feasible_local_search: restarts must be >= 1");
  const int n = inst.n;
  const int m = inst.m;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double kappa = inst.kappa;
  const auto row_energy = [&](double dot) {
    const double gap = kappa - dot * inv_sqrt_n;
    return gap > 0.0 ? gap * gap : 0.0;
  };
  const CounterRng rng(search_seed);
  const long max_steps = 10L * n * m + 1000;

  SignVector x(n);
  std::vector<double> s(m);
  for (int r = 0; r < restarts; ++r) {
    for (int j = 0; j < n; j += 128) {
      const auto w = rng.raw(static_cast<std::uint64_t>(r), static_cast<std::uint32_t>(j / 128),
                             kTagSigns);
      for (int b = j; b < std::min(n, j + 128); ++b) {
        const int bit = b - j;
        x[b] = ((w[bit / 32] >> (bit % 32)) & 1u) ? 1 : -1;
      }
    }
    for (int i = 0; i < m; ++i) {
      const auto g = inst.row(i);
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += g[j] * x[j];
      s[i] = dot;
    }

    for (long step = 0; step < max_steps; ++step) {
      double energy = 0.0;
      for (int i = 0; i < m; ++i) energy += row_energy(s[i]);
      if (energy == 0.0) break;

      int best = -1;
      double best_delta = 0.0;
      for (int j = 0; j < n; ++j) {
        const double flip = x[j] > 0 ? -2.0 : 2.0;
        double delta = 0.0;
        for (int i = 0; i < m; ++i) {
          const double g = inst.entries[static_cast<std::size_t>(i) * n + j];
          delta += row_energy(s[i] + flip * g) - row_energy(s[i]);
        }
        if (delta < best_delta) {
          best_delta = delta;
          best = j;
        }
      }
      if (best < 0) break;  // local minimum
      const double flip = x[best] > 0 ? -2.0 : 2.0;
      for (int i = 0; i < m; ++i) s[i] += flip * inst.entries[static_cast<std::size_t>(i) * n + best];
      x[best] = static_cast<std::int8_t>(-x[best]);
    }
    if (certified(inst, x)) return {true, x};
  }
  return {false, std::nullopt};
}

std::string_view to_string(McMethod method) {
  return method == McMethod::Exhaustive ? "exhaustive" : "local_search";
}

McMethod parse_mc_method(std::string_view text) {
  if (text == "exhaustive") return McMethod::Exhaustive;
  if (text == "local" || text == "local_search") return McMethod::LocalSearch;
  throw InvalidArgument("unknown method '" + std::string(text) +
                        "' (expected exhaustive or local)");
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw InvalidArgument("wilson_interval: need 0 <= successes <= trials, trials >= 1");
  }
  constexpr double z = 1.959963984540054;
  const double nt = trials;
  const double p = successes / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt));
  const double lo = std::max(0.0, center - half);
  const double hi = std::min(1.0, center + half);
  return {std::min(lo, p), std::max(hi, p)};
}

std::uint64_t trial_instance_seed(std::uint64_t seed, int trial) {
  return CounterRng(seed).derive(static_cast<std::uint64_t>(trial), kDeriveInstance);
}

std::vector<std::uint8_t> trial_outcomes(int n, int m, double kappa, int trials, McMethod method,
                                         std::uint64_t seed, const McOptions& opts) {
  require_dimensions(n, m);
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (method == McMethod::Exhaustive && n > opts.exhaustive_cap) {
    throw CapacityCapError("exhaustive enumeration capped at n = " +
                           std::to_string(opts.exhaustive_cap) + ", got n = " + std::to_string(n));
  }
  if (method == McMethod::LocalSearch && opts.restarts < 1) {
    throw InvalidArgument("restarts must be >= 1");
  }
  std::vector<std::uint8_t> outcomes(static_cast<std::size_t>(trials), 0);
  const CounterRng fan(seed);
  parallel_for(outcomes.size(), [&](std::size_t t) {
    const auto inst = sample_instance(n, m, kappa, trial_instance_seed(seed, static_cast<int>(t)));
    FeasibilityResult r;
    if (method == McMethod::Exhaustive) {
      r = feasible_exhaustive(inst, opts.exhaustive_cap);
    } else {
      const std::uint64_t search_seed = fan.derive(t, kDeriveSearch + static_cast<std::uint32_t>(m));
      r = feasible_local_search(inst, opts.restarts, search_seed);
    }
    outcomes[t] = r.feasible ? 1 : 0;
  });
  return outcomes;
}

std::vector<MCEstimate> estimate_feasibility(int n, const std::vector<int>& m_grid, double kappa,
                                             int trials, McMethod method, std::uint64_t seed,
                                             const McOptions& opts) {
  if (m_grid.empty()) throw InvalidArgument("estimate_feasibility: empty m grid");
  std::vector<MCEstimate> out;
  out.reserve(m_grid.size());
  for (int m : m_grid) {
    const auto outcomes = trial_outcomes(n, m, kappa, trials, method, seed, opts);
    MCEstimate est;
    est.n = n;
    est.m = m;
    est.kappa = kappa;
    est.trials = trials;
    est.method = method;
    for (auto o : outcomes) est.successes += o;
    est.rate = static_cast<double>(est.successes) / trials;
    std::tie(est.ci_lo, est.ci_hi) = wilson_interval(est.successes, trials);
    out.push_back(est);
  }
  return out;
}

ThresholdEstimate empirical_threshold(int n, double kappa, int trials, McMethod method,
                                      std::uint64_t seed, const ThresholdConfig& cfg) {
  const int m_max = cfg.m_max > 0 ? cfg.m_max : 3 * n;
  if (cfg.m_min < 1 || m_max < cfg.m_min) {
    throw InvalidArgument("empirical_threshold: need 1 <= m_min <= m_max");
  }
  ThresholdEstimate result;
  const auto observed = [&] {
    std::vector<std::pair<int, double>> curve;
    for (const auto& e : result.curve) curve.emplace_back(e.m, e.rate);
    return curve;
  };
  for (int m = cfg.m_min; m <= m_max; ++m) {
    const MCEstimate est = estimate_feasibility(n, {m}, kappa, trials, method, seed, cfg.mc)[0];
    result.curve.push_back(est);
    if (est.rate >= 0.5) continue;
    if (result.curve.size() == 1) {
      throw RangeError("feasibility rate already below 0.5 at m_min = " + std::to_string(m),
                       observed());
    }
    const MCEstimate& prev = result.curve[result.curve.size() - 2];
    const double drop = prev.rate - est.rate;
    const double dm = est.m - prev.m;
    result.m_star = prev.m + (prev.rate - 0.5) / drop * dm;
    result.alpha_hat = result.m_star / n;
    const double half_width = std::max(0.5 * (prev.ci_hi - prev.ci_lo), 0.5 * (est.ci_hi - est.ci_lo));
    result.uncertainty = half_width / drop * dm / n;
    return result;
  }
  throw RangeError("feasibility rate never crossed 0.5 for m in [" + std::to_string(cfg.m_min) +
                       ", " + std::to_string(m_max) + "]",
                   observed());
}

}  // namespace percap
