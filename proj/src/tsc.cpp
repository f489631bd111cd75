#include "wpir/tsc.hpp"

#include <string>

namespace wpir {

namespace {

void check_indices(const SystemParams& params, int k, int n) {
  if (k < 1 || k > params.num_messages()) throw std::invalid_argument("message index must be in 1:K");
  if (n < 1 || n > params.num_servers()) throw std::invalid_argument("server index must be in 1:N");
}

}  // namespace

QueryVector tsc_query(const SystemParams& params, int k, const TscKey& key, int n) {
  check_indices(params, k, n);
  const int servers = params.num_servers();
  QueryVector q;
  q.digits.reserve(static_cast<std::size_t>(params.num_messages()));
  q.digits.insert(q.digits.end(), key.interference.begin(), key.interference.begin() + (k - 1));
  q.digits.push_back((key.shift + n) % servers);
  q.digits.insert(q.digits.end(), key.interference.begin() + (k - 1), key.interference.end());
  return q;
}

Answer tsc_answer(const SystemParams& params, const QueryVector& query, const MessageStore& store) {
  if (static_cast<int>(query.digits.size()) != params.num_messages()) {
    throw std::invalid_argument("query vector must have K digits");
  }
  if (query.is_zero()) return {};
  Symbol sum = 0;
  for (int m = 1; m <= params.num_messages(); ++m) {
    sum ^= store.at(m, query.digits[static_cast<std::size_t>(m - 1)]);
  }
  return {sum};
}

int interference_server(const SystemParams& params, const TscKey& key) {
  const int n = params.num_servers();
  const int r = ((-key.shift) % n + n) % n;
  return r == 0 ? n : r;
}

Message tsc_decode(const SystemParams& params, int k, const TscKey& key,
                   std::span<const Answer> answers) {
  const int n = params.num_servers();
  if (static_cast<int>(answers.size()) != n) {
    throw MalformedAnswers("expected one answer per server");
  }
  for (int s = 1; s <= n; ++s) {
    const int expected = answer_length(params, Query{tsc_query(params, k, key, s)});
    if (static_cast<int>(answers[static_cast<std::size_t>(s - 1)].size()) != expected) {
      throw MalformedAnswers("answer from server " + std::to_string(s) + " has the wrong length");
    }
  }

  const int n0 = interference_server(params, key);
  const Answer& noise = answers[static_cast<std::size_t>(n0 - 1)];
  const Symbol interference = noise.empty() ? Symbol{0} : noise.front();

  Message out(static_cast<std::size_t>(params.message_length()));
  for (int s = 1; s <= n; ++s) {
    if (s == n0) continue;
    const int index = (key.shift + s) % n;
    out[static_cast<std::size_t>(index - 1)] = answers[static_cast<std::size_t>(s - 1)].front() ^ interference;
  }
  return out;
}

}  // namespace wpir
