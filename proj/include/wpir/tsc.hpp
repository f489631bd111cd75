#pragma once

#include <span>

#include "wpir/core.hpp"

namespace wpir {

/// Query to server n for message k: the shifted desired index (U + n) mod N
/// sits at position k, the interference digits fill the other positions in
/// order. For fixed (k, n) this is a bijection from keys onto [0:N-1]^K.
QueryVector tsc_query(const SystemParams& params, int k, const TscKey& key, int n);

/// XOR of W_m[q_m] over all m; empty when q is all zero.
Answer tsc_answer(const SystemParams& params, const QueryVector& query, const MessageStore& store);

/// The server n0 with (U + n0) mod N = 0. Its answer is the interference alone.
int interference_server(const SystemParams& params, const TscKey& key);

/// Recovers W_k from the N answers to tsc_query(k, key, 1..N).
/// Throws MalformedAnswers if any answer length disagrees with its query.
Message tsc_decode(const SystemParams& params, int k, const TscKey& key,
                   std::span<const Answer> answers);

}  // namespace wpir
