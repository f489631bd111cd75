#include "wpir/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wpir/rng.hpp"

namespace wpir {

SystemParams::SystemParams(int num_servers, int num_messages)
    : servers_(num_servers), messages_(num_messages) {
  if (num_servers < 2 || num_servers > kMaxServers) {
    throw std::invalid_argument("number of servers must be in 2:" + std::to_string(kMaxServers));
  }
  if (num_messages < 2) throw std::invalid_argument("number of messages must be at least 2");
}

std::uint64_t SystemParams::tsc_key_count() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  for (int i = 0; i < messages_; ++i) {
    if (count > kMax / static_cast<std::uint64_t>(servers_)) return kMax;
    count *= static_cast<std::uint64_t>(servers_);
  }
  return count;
}

std::uint64_t SystemParams::key_count() const {
  const std::uint64_t tsc = tsc_key_count();
  const auto n = static_cast<std::uint64_t>(servers_);
  return tsc > std::numeric_limits<std::uint64_t>::max() - n ? tsc : tsc + n;
}

MessageStore::MessageStore(const SystemParams& params, std::vector<Message> messages)
    : messages_(std::move(messages)), length_(params.message_length()) {
  if (static_cast<int>(messages_.size()) != params.num_messages()) {
    throw std::invalid_argument("message store must hold exactly K messages");
  }
  for (const auto& m : messages_) {
    if (static_cast<int>(m.size()) != length_) {
      throw std::invalid_argument("every message must hold exactly L = N - 1 symbols");
    }
  }
}

MessageStore MessageStore::random(const SystemParams& params, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<Message> messages(static_cast<std::size_t>(params.num_messages()));
  for (auto& m : messages) {
    m.resize(static_cast<std::size_t>(params.message_length()));
    for (auto& s : m) s = static_cast<Symbol>(byte(rng));
  }
  return MessageStore(params, std::move(messages));
}

Symbol MessageStore::at(int k, int i) const {
  if (i == 0) return 0;
  return message(k).at(static_cast<std::size_t>(i - 1));
}

const Message& MessageStore::message(int k) const {
  return messages_.at(static_cast<std::size_t>(k - 1));
}

bool QueryVector::is_zero() const {
  return std::all_of(digits.begin(), digits.end(), [](int d) { return d == 0; });
}

int answer_length(const SystemParams& params, const Query& query) {
  if (std::holds_alternative<DirectRequest>(query)) return params.message_length();
  return std::get<QueryVector>(query).is_zero() ? 0 : 1;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

double weight_class_size(const SystemParams& params, int w) {
  const int n = params.num_servers();
  return n * binomial(params.num_messages() - 1, w) * std::pow(n - 1.0, w);
}

double total_probability(const SystemParams& params, const PatternDistribution& dist) {
  double total = params.num_servers() * dist.p_direct;
  for (int w = 0; w < dist.p_weights.size(); ++w) {
    total += weight_class_size(params, w) * dist.p_weights(w);
  }
  return total;
}

void validate(const SystemParams& params, const PatternDistribution& dist) {
  if (dist.p_weights.size() != params.num_messages()) {
    throw std::invalid_argument("p_weights must have K entries");
  }
  if (!(dist.p_direct >= 0.0) || !(dist.p_weights.array() >= 0.0).all()) {
    throw std::invalid_argument("probabilities must be nonnegative");
  }
  const double total = total_probability(params, dist);
  if (!(std::abs(total - 1.0) <= kNormalizationTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "distribution is not normalized: total probability " << total;
    throw std::invalid_argument(os.str());
  }
}

PatternDistribution uniform_tsc_distribution(const SystemParams& params) {
  const double p = 1.0 / static_cast<double>(params.tsc_key_count());
  return {0.0, Eigen::VectorXd::Constant(params.num_messages(), p)};
}

PatternDistribution direct_only_distribution(const SystemParams& params) {
  return {1.0 / params.num_servers(), Eigen::VectorXd::Zero(params.num_messages())};
}

PatternDistribution normalized_tsc_distribution(const SystemParams& params,
                                                const Eigen::VectorXd& raw_weights) {
  if (raw_weights.size() != params.num_messages() || (raw_weights.array() < 0.0).any()) {
    throw std::invalid_argument("raw weights must be K nonnegative numbers");
  }
  PatternDistribution dist{0.0, raw_weights};
  const double total = total_probability(params, dist);
  if (!(total > 0.0)) throw std::invalid_argument("raw weights must not all be zero");
  dist.p_weights /= total;
  return dist;
}

void validate(const SystemParams& params, const RandomKey& key) {
  const int n = params.num_servers();
  if (const auto* direct = std::get_if<DirectKey>(&key)) {
    if (direct->server < 1 || direct->server > n) {
      throw std::invalid_argument("direct key server must be in 1:N");
    }
    return;
  }
  const auto& tsc = std::get<TscKey>(key);
  if (static_cast<int>(tsc.interference.size()) != params.num_messages() - 1) {
    throw std::invalid_argument("TSC key must carry K - 1 interference digits");
  }
  auto in_range = [n](int d) { return d >= 0 && d < n; };
  if (!in_range(tsc.shift) || !std::all_of(tsc.interference.begin(), tsc.interference.end(), in_range)) {
    throw std::invalid_argument("TSC key digits must be in 0:N-1");
  }
}

std::optional<int> key_weight(const RandomKey& key) {
  if (std::holds_alternative<DirectKey>(key)) return std::nullopt;
  const auto& f = std::get<TscKey>(key).interference;
  return static_cast<int>(std::count_if(f.begin(), f.end(), [](int d) { return d != 0; }));
}

double key_probability(const PatternDistribution& dist, const RandomKey& key) {
  const auto w = key_weight(key);
  return w ? dist.p_weights(*w) : dist.p_direct;
}

RandomKey sample_key(const SystemParams& params, const PatternDistribution& dist, Rng& rng) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> server(1, n);

  // Pick the pattern class by its total mass, then a key uniformly inside it.
  double u = unit(rng);
  int chosen_weight = -1;
  const double direct_mass = n * dist.p_direct;
  if (u >= direct_mass) {
    u -= direct_mass;
    int last_nonempty = -1;
    for (int w = 0; w < k; ++w) {
      const double mass = weight_class_size(params, w) * dist.p_weights(w);
      if (mass > 0.0) last_nonempty = w;
      if (u < mass) {
        chosen_weight = w;
        break;
      }
      u -= mass;
    }
    // Rounding can leave u just past the final class.
    if (chosen_weight < 0) chosen_weight = last_nonempty;
  }
  if (chosen_weight < 0) return DirectKey{server(rng)};

  TscKey key{std::vector<int>(static_cast<std::size_t>(k - 1), 0), 0};
  std::vector<int> positions(static_cast<std::size_t>(k - 1));
  std::iota(positions.begin(), positions.end(), 0);
  std::shuffle(positions.begin(), positions.end(), rng);
  std::uniform_int_distribution<int> nonzero(1, n - 1);
  for (int i = 0; i < chosen_weight; ++i) {
    key.interference[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])] = nonzero(rng);
  }
  key.shift = std::uniform_int_distribution<int>(0, n - 1)(rng);
  return key;
}

}  // namespace wpir
