#pragma once

#include <span>

#include "wpir/core.hpp"

namespace wpir {

/// TSC retrieval patterns plus the single-server direct download #_k, mixed
/// according to a PatternDistribution. Immutable once built.
class WpirScheme {
 public:
  WpirScheme(SystemParams params, PatternDistribution dist);

  const SystemParams& params() const { return params_; }
  const PatternDistribution& distribution() const { return dist_; }

 private:
  SystemParams params_;
  PatternDistribution dist_;
};

/// #_k to the chosen server of a direct key, 0_K to the others; the TSC
/// query for TSC keys.
Query wpir_query(const WpirScheme& scheme, int k, const RandomKey& key, int n);

/// The whole message for #_k; tsc_answer for vectors.
Answer wpir_answer(const WpirScheme& scheme, const Query& query, const MessageStore& store);

Message wpir_decode(const WpirScheme& scheme, int k, const RandomKey& key,
                    std::span<const Answer> answers);

struct DownloadCost {
  double direct_probability;  // p_d = N (p'_0 + p_0)
  double cost;                // D = p_d + N/(N-1) (1 - p_d)
};

DownloadCost download_cost(const WpirScheme& scheme);

}  // namespace wpir
