#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "wpir/core.hpp"
#include "wpir/scheme.hpp"

namespace wpir {

/// An in-process server holding a replica of the message store. The only
/// thing a client can do with it is ask a query and read the answer.
class Server {
 public:
  Server(const WpirScheme& scheme, const MessageStore& store) : scheme_(&scheme), store_(&store) {}

  Answer answer(const Query& query) const { return wpir_answer(*scheme_, query, *store_); }

 private:
  const WpirScheme* scheme_;
  const MessageStore* store_;
};

struct SimConfig {
  WpirScheme scheme;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t message_seed = 0;
  unsigned threads = 1;
};

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t message_seed = 0;
  double success_rate = 0.0;
  double empirical_download = 0.0;
  double download_stderr = 0.0;
  std::vector<double> per_message_download;  // mean D for each requested k
  std::vector<std::uint64_t> per_message_trials;
  double theoretical_download = 0.0;
  /// Per server: canonical query index -> observed frequency under uniform M.
  std::vector<std::map<std::uint64_t, double>> empirical_query_freq;
  /// max over (n, q) of |observed - exact| frequency; NaN when the scheme is
  /// too large to enumerate.
  double max_freq_deviation = 0.0;
  /// Every cell inside 4 sqrt(p (1 - p) / trials).
  bool freq_within_bound = true;
};

/// Draws k uniformly and a key from the scheme for every trial, queries all
/// servers, decodes and tallies. Trial t uses its own substream of `seed`, so
/// the report does not depend on the thread count.
SimReport run_simulation(const SimConfig& config);

struct LawDeviation {
  double max_deviation;
  bool within_bound;
};

LawDeviation empirical_vs_theoretical_law(const SimConfig& config);

}  // namespace wpir
