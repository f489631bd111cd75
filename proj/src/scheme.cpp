#include "wpir/scheme.hpp"

#include <string>

#include "wpir/tsc.hpp"

namespace wpir {

WpirScheme::WpirScheme(SystemParams params, PatternDistribution dist)
    : params_(params), dist_(std::move(dist)) {
  validate(params_, dist_);
}

Query wpir_query(const WpirScheme& scheme, int k, const RandomKey& key, int n) {
  const auto& params = scheme.params();
  if (k < 1 || k > params.num_messages()) throw std::invalid_argument("message index must be in 1:K");
  if (n < 1 || n > params.num_servers()) throw std::invalid_argument("server index must be in 1:N");
  validate(params, key);
  if (const auto* direct = std::get_if<DirectKey>(&key)) {
    if (direct->server == n) return DirectRequest{k};
    return QueryVector{std::vector<int>(static_cast<std::size_t>(params.num_messages()), 0)};
  }
  return tsc_query(params, k, std::get<TscKey>(key), n);
}

Answer wpir_answer(const WpirScheme& scheme, const Query& query, const MessageStore& store) {
  if (const auto* request = std::get_if<DirectRequest>(&query)) {
    if (request->message < 1 || request->message > scheme.params().num_messages()) {
      throw std::invalid_argument("direct request message index must be in 1:K");
    }
    return store.message(request->message);
  }
  return tsc_answer(scheme.params(), std::get<QueryVector>(query), store);
}

Message wpir_decode(const WpirScheme& scheme, int k, const RandomKey& key,
                    std::span<const Answer> answers) {
  const auto& params = scheme.params();
  if (const auto* direct = std::get_if<DirectKey>(&key)) {
    if (static_cast<int>(answers.size()) != params.num_servers()) {
      throw MalformedAnswers("expected one answer per server");
    }
    for (int s = 1; s <= params.num_servers(); ++s) {
      const int expected = s == direct->server ? params.message_length() : 0;
      if (static_cast<int>(answers[static_cast<std::size_t>(s - 1)].size()) != expected) {
        throw MalformedAnswers("answer from server " + std::to_string(s) + " has the wrong length");
      }
    }
    return answers[static_cast<std::size_t>(direct->server - 1)];
  }
  return tsc_decode(params, k, std::get<TscKey>(key), answers);
}

DownloadCost download_cost(const WpirScheme& scheme) {
  const int n = scheme.params().num_servers();
  const auto& dist = scheme.distribution();
  const double pd = n * (dist.p_direct + dist.p_weights(0));
  return {pd, pd + n / (n - 1.0) * (1.0 - pd)};
}

}  // namespace wpir
