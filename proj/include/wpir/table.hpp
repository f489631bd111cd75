#pragma once

#include <string>
#include <vector>

#include "wpir/core.hpp"

namespace wpir {

/// Message letter: a, b, c, ... for messages 1, 2, 3, ...
std::string message_symbol(int k, int index);

/// "#_k" for a direct request, the digit string otherwise ("00" for 0_K).
std::string render_query(const Query& query);

/// Symbolic answer: "a_1,a_2" for #_1, "a_2⊕b_1" for (2,1), "∅" for 0_K.
std::string render_answer(const SystemParams& params, const Query& query);

/// "p'_0" for direct keys, "p_w" for TSC keys of interference weight w.
std::string probability_class(const RandomKey& key);

/// Direct keys by server ("2"); TSC keys as F*_1..F*_{K-1} then U ("012").
std::string render_key(const RandomKey& key);

struct TableRow {
  std::string probability_class;
  std::string key;
  std::vector<std::string> queries;  // one per server
  std::vector<std::string> answers;  // one per server
};

/// One row per key (direct keys first, then TSC keys) for retrieving message k.
std::vector<TableRow> query_table(const SystemParams& params, int k);

/// Fixed-width text rendering of query_table.
std::string format_table(const SystemParams& params, int k, const std::vector<TableRow>& rows);

}  // namespace wpir
