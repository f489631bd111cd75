#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace wpir {

/// Symbols live in GF(2^8); addition and subtraction are both bytewise XOR.
using Symbol = std::uint8_t;
using Message = std::vector<Symbol>;
using Answer = std::vector<Symbol>;

class MalformedAnswers : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixes a scheme instance: N servers, K messages, L = N - 1 symbols per
/// message. Servers and messages are 1-based throughout.
class SystemParams {
 public:
  static constexpr int kAlphabetOrder = 256;
  // Query digits are stored as bytes in canonical query keys.
  static constexpr int kMaxServers = 256;

  SystemParams(int num_servers, int num_messages);

  int num_servers() const { return servers_; }
  int num_messages() const { return messages_; }
  int message_length() const { return servers_ - 1; }

  /// N^K, saturated at UINT64_MAX.
  std::uint64_t tsc_key_count() const;
  /// N^K + N, saturated.
  std::uint64_t key_count() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  int servers_;
  int messages_;
};

/// K replicated messages of L symbols. Index 0 of every message is the
/// implicit zero dummy symbol and is never stored.
class MessageStore {
 public:
  MessageStore(const SystemParams& params, std::vector<Message> messages);

  static MessageStore random(const SystemParams& params, std::uint64_t seed);

  /// W_k[i] for k in 1:K, i in 0:L.
  Symbol at(int k, int i) const;
  const Message& message(int k) const;

  int num_messages() const { return static_cast<int>(messages_.size()); }
  int message_length() const { return length_; }

 private:
  std::vector<Message> messages_;
  int length_;
};

struct DirectKey {
  int server;  // 1:N

  friend bool operator==(const DirectKey&, const DirectKey&) = default;
};

/// (F*_1, ..., F*_{K-1}, U): interference digits plus the cyclic shift.
struct TscKey {
  std::vector<int> interference;
  int shift = 0;

  friend bool operator==(const TscKey&, const TscKey&) = default;
};

using RandomKey = std::variant<DirectKey, TscKey>;

struct DirectRequest {
  int message;  // 1:K

  friend bool operator==(const DirectRequest&, const DirectRequest&) = default;
};

struct QueryVector {
  std::vector<int> digits;  // length K, each in 0:N-1

  bool is_zero() const;
  friend bool operator==(const QueryVector&, const QueryVector&) = default;
};

using Query = std::variant<DirectRequest, QueryVector>;

/// Number of answer symbols a query produces: L for #_k, 0 for 0_K, 1 otherwise.
int answer_length(const SystemParams& params, const Query& query);

/// Probability p'_0 of each direct key, and p_w of each TSC key whose
/// interference digits have Hamming weight w.
struct PatternDistribution {
  double p_direct = 0.0;
  Eigen::VectorXd p_weights;
};

inline constexpr double kNormalizationTolerance = 1e-12;

double binomial(int n, int k);

/// Number of TSC keys of interference weight w: N * C(K-1, w) * (N-1)^w.
double weight_class_size(const SystemParams& params, int w);

/// N p'_0 + N sum_w C(K-1,w)(N-1)^w p_w.
double total_probability(const SystemParams& params, const PatternDistribution& dist);

/// Throws std::invalid_argument on wrong size, negative entries or a total
/// probability further than kNormalizationTolerance from one.
void validate(const SystemParams& params, const PatternDistribution& dist);

PatternDistribution uniform_tsc_distribution(const SystemParams& params);
PatternDistribution direct_only_distribution(const SystemParams& params);

/// Scales nonnegative per-class weights into a normalized TSC-only distribution.
PatternDistribution normalized_tsc_distribution(const SystemParams& params,
                                                const Eigen::VectorXd& raw_weights);

void validate(const SystemParams& params, const RandomKey& key);

/// Interference weight of a TSC key; nullopt marks a direct key.
std::optional<int> key_weight(const RandomKey& key);

double key_probability(const PatternDistribution& dist, const RandomKey& key);

/// Visits all N^K TSC keys in lexicographic order of (F*_1, ..., F*_{K-1}, U),
/// then the N direct keys.
template <typename Visitor>
void for_each_key(const SystemParams& params, Visitor&& visit) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  TscKey key{std::vector<int>(static_cast<std::size_t>(k - 1), 0), 0};
  while (true) {
    visit(RandomKey{key});
    int pos = k - 1;  // position K-1 is the shift
    while (pos >= 0) {
      int& digit = pos == k - 1 ? key.shift : key.interference[static_cast<std::size_t>(pos)];
      if (++digit < n) break;
      digit = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  for (int s = 1; s <= n; ++s) visit(RandomKey{DirectKey{s}});
}

using Rng = std::mt19937_64;

RandomKey sample_key(const SystemParams& params, const PatternDistribution& dist, Rng& rng);

}  // namespace wpir
