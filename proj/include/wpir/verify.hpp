#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpir/core.hpp"

namespace wpir {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Random TSC-only distribution with every class weight positive.
PatternDistribution random_tsc_distribution(const SystemParams& params, Rng& rng);
/// Random TSC distribution mixed with the direct pattern at a random weight.
PatternDistribution random_mixed_distribution(const SystemParams& params, Rng& rng);

/// Runs the exhaustive self-checks for one (N, K): decoding over every key and
/// message, server symmetry, enumerated vs closed-form download cost and
/// leakage, the maximal-leakage solution and KKT stationarity of the MI
/// solution. Throws TooLarge when N^K is past the enumeration limit.
std::vector<CheckResult> run_verification(const SystemParams& params, std::uint64_t seed);

}  // namespace wpir
