#include "wpir/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "wpir/leakage.hpp"
#include "wpir/rng.hpp"

namespace wpir {

namespace {

struct Tally {
  std::uint64_t successes = 0;
  std::uint64_t symbols = 0;
  std::uint64_t symbols_sq = 0;
  std::vector<std::uint64_t> per_message_symbols;
  std::vector<std::uint64_t> per_message_trials;
  std::vector<std::map<std::uint64_t, std::uint64_t>> query_counts;

  Tally(int servers, int messages)
      : per_message_symbols(static_cast<std::size_t>(messages)),
        per_message_trials(static_cast<std::size_t>(messages)),
        query_counts(static_cast<std::size_t>(servers)) {}

  void merge(const Tally& other) {
    successes += other.successes;
    symbols += other.symbols;
    symbols_sq += other.symbols_sq;
    for (std::size_t i = 0; i < per_message_symbols.size(); ++i) {
      per_message_symbols[i] += other.per_message_symbols[i];
      per_message_trials[i] += other.per_message_trials[i];
    }
    for (std::size_t n = 0; n < query_counts.size(); ++n) {
      for (const auto& [q, c] : other.query_counts[n]) query_counts[n][q] += c;
    }
  }
};

void run_trials(const SimConfig& config, const std::vector<Server>& servers, const MessageStore& store,
                std::uint64_t begin, std::uint64_t end, Tally& tally) {
  const auto& scheme = config.scheme;
  const auto& params = scheme.params();
  const int n_servers = params.num_servers();
  std::vector<Answer> answers(static_cast<std::size_t>(n_servers));

  for (std::uint64_t t = begin; t < end; ++t) {
    Rng rng = make_stream(config.seed, t);
    const int k = std::uniform_int_distribution<int>(1, params.num_messages())(rng);
    const RandomKey key = sample_key(params, scheme.distribution(), rng);

    std::uint64_t downloaded = 0;
    for (int n = 1; n <= n_servers; ++n) {
      const Query query = wpir_query(scheme, k, key, n);
      ++tally.query_counts[static_cast<std::size_t>(n - 1)][query_index(params, query)];
      answers[static_cast<std::size_t>(n - 1)] = servers[static_cast<std::size_t>(n - 1)].answer(query);
      downloaded += answers[static_cast<std::size_t>(n - 1)].size();
    }
    if (wpir_decode(scheme, k, key, answers) == store.message(k)) ++tally.successes;

    tally.symbols += downloaded;
    tally.symbols_sq += downloaded * downloaded;
    tally.per_message_symbols[static_cast<std::size_t>(k - 1)] += downloaded;
    ++tally.per_message_trials[static_cast<std::size_t>(k - 1)];
  }
}

}  // namespace

SimReport run_simulation(const SimConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
  const auto& scheme = config.scheme;
  const auto& params = scheme.params();
  const int n_servers = params.num_servers();
  const int n_messages = params.num_messages();

  const MessageStore store = MessageStore::random(params, config.message_seed);
  std::vector<Server> servers;
  for (int n = 0; n < n_servers; ++n) servers.emplace_back(scheme, store);

  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, 64));
  std::vector<Tally> tallies(threads, Tally(n_servers, n_messages));
  {
    std::vector<std::jthread> workers;
    for (unsigned i = 0; i < threads; ++i) {
      const std::uint64_t begin = config.trials * i / threads;
      const std::uint64_t end = config.trials * (i + 1) / threads;
      workers.emplace_back([&, begin, end, i] { run_trials(config, servers, store, begin, end, tallies[i]); });
    }
  }
  Tally total(n_servers, n_messages);
  for (const auto& t : tallies) total.merge(t);

  const auto trials = static_cast<double>(config.trials);
  const double length = params.message_length();
  SimReport report;
  report.trials = config.trials;
  report.seed = config.seed;
  report.message_seed = config.message_seed;
  report.success_rate = static_cast<double>(total.successes) / trials;
  report.empirical_download = static_cast<double>(total.symbols) / trials / length;
  if (config.trials > 1) {
    const double s = static_cast<double>(total.symbols);
    const double var = (static_cast<double>(total.symbols_sq) - s * s / trials) / (trials - 1.0);
    report.download_stderr = std::sqrt(std::max(0.0, var) / trials) / length;
  }
  for (int k = 0; k < n_messages; ++k) {
    const auto count = total.per_message_trials[static_cast<std::size_t>(k)];
    report.per_message_trials.push_back(count);
    report.per_message_download.push_back(
        count == 0 ? std::numeric_limits<double>::quiet_NaN()
                   : static_cast<double>(total.per_message_symbols[static_cast<std::size_t>(k)]) /
                         static_cast<double>(count) / length);
  }
  report.theoretical_download = download_cost(scheme).cost;

  for (const auto& counts : total.query_counts) {
    std::map<std::uint64_t, double> freq;
    for (const auto& [q, c] : counts) freq[q] = static_cast<double>(c) / trials;
    report.empirical_query_freq.push_back(std::move(freq));
  }

  report.max_freq_deviation = std::numeric_limits<double>::quiet_NaN();
  report.freq_within_bound = true;
  if (params.tsc_key_count() <= kEnumerationLimit) {
    double worst = 0.0;
    for (int n = 1; n <= n_servers; ++n) {
      const Eigen::VectorXd marginal = enumerate_query_law(scheme, n).conditional.rowwise().mean();
      const auto& observed = report.empirical_query_freq[static_cast<std::size_t>(n - 1)];
      for (Eigen::Index q = 0; q < marginal.size(); ++q) {
        const auto it = observed.find(static_cast<std::uint64_t>(q));
        const double seen = it == observed.end() ? 0.0 : it->second;
        const double p = marginal(q);
        const double deviation = std::abs(seen - p);
        worst = std::max(worst, deviation);
        if (deviation > 4.0 * std::sqrt(p * (1.0 - p) / trials)) report.freq_within_bound = false;
      }
    }
    report.max_freq_deviation = worst;
  }
  return report;
}

LawDeviation empirical_vs_theoretical_law(const SimConfig& config) {
  if (config.scheme.params().tsc_key_count() > kEnumerationLimit) {
    throw TooLarge("scheme is too large to enumerate its exact query law");
  }
  const SimReport report = run_simulation(config);
  return {report.max_freq_deviation, report.freq_within_bound};
}

}  // namespace wpir
