#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace percap::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConvergence = 2,
  kRange = 3,  // Monte Carlo cap or range violations
};

/// Entry point behind the `percap` executable. `args` excludes the program name.
///
///   capacity   --kappa K [--level 1|2p|2f]
///   curve      [--kappa-min A --kappa-max B --step S] [--level ...]
///   table      1|2|3
///   kappa-c
///   uniqueness [--kappa K] [--q-min A --q-max B --points N]
///   simulate   --n N (--m M[,M...] | --alpha A[,A...]) [--kappa K] [--trials T]
///              [--method exhaustive|local] [--restarts R] [--seed S]
///   threshold  --n N [--kappa K] [--trials T] [--method ...] [--restarts R] [--seed S]
///
/// Shared flags: --nodes (Gauss-Hermite order, default 200), --rule hermite|composite,
/// --tol (default 1e-10), --format json|csv, --out FILE, --allow-extrapolation.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a 64-bit seed given in decimal or 0x-prefixed hexadecimal.
unsigned long long parse_seed(const std::string& text);

}  // namespace percap::cli
