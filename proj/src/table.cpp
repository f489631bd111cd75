#include "wpir/table.hpp"

#include <algorithm>
#include <sstream>

#include "wpir/scheme.hpp"

namespace wpir {

namespace {

constexpr const char* kXor = "⊕";
constexpr const char* kEmpty = "∅";

std::string digit_string(const std::vector<int>& digits) {
  std::string out;
  for (int d : digits) out += d < 10 ? std::string(1, static_cast<char>('0' + d)) : "(" + std::to_string(d) + ")";
  return out;
}

// Terminal columns taken by a UTF-8 string.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(width > display_width(s) ? width - display_width(s) : 0, ' ');
}

}  // namespace

std::string message_symbol(int k, int index) {
  const std::string letter = k <= 26 ? std::string(1, static_cast<char>('a' + k - 1)) : "w" + std::to_string(k);
  return letter + "_" + std::to_string(index);
}

std::string render_query(const Query& query) {
  if (const auto* request = std::get_if<DirectRequest>(&query)) return "#_" + std::to_string(request->message);
  return digit_string(std::get<QueryVector>(query).digits);
}

std::string render_answer(const SystemParams& params, const Query& query) {
  if (const auto* request = std::get_if<DirectRequest>(&query)) {
    std::string out;
    for (int i = 1; i <= params.message_length(); ++i) {
      if (i > 1) out += ",";
      out += message_symbol(request->message, i);
    }
    return out;
  }
  const auto& digits = std::get<QueryVector>(query).digits;
  std::string out;
  for (std::size_t m = 0; m < digits.size(); ++m) {
    if (digits[m] == 0) continue;
    if (!out.empty()) out += kXor;
    out += message_symbol(static_cast<int>(m) + 1, digits[m]);
  }
  return out.empty() ? kEmpty : out;
}

std::string probability_class(const RandomKey& key) {
  const auto w = key_weight(key);
  return w ? "p_" + std::to_string(*w) : "p'_0";
}

std::string render_key(const RandomKey& key) {
  if (const auto* direct = std::get_if<DirectKey>(&key)) return std::to_string(direct->server);
  const auto& tsc = std::get<TscKey>(key);
  std::vector<int> digits = tsc.interference;
  digits.push_back(tsc.shift);
  return digit_string(digits);
}

std::vector<TableRow> query_table(const SystemParams& params, int k) {
  if (params.tsc_key_count() > 4096) throw TooLarge("table has too many rows to print");
  // Only the query map matters here; any valid distribution will do.
  const WpirScheme scheme(params, uniform_tsc_distribution(params));

  std::vector<RandomKey> keys;
  for_each_key(params, [&](const RandomKey& key) { keys.push_back(key); });
  std::stable_partition(keys.begin(), keys.end(),
                        [](const RandomKey& key) { return std::holds_alternative<DirectKey>(key); });

  std::vector<TableRow> rows;
  for (const auto& key : keys) {
    TableRow row{probability_class(key), render_key(key), {}, {}};
    for (int n = 1; n <= params.num_servers(); ++n) {
      const Query q = wpir_query(scheme, k, key, n);
      row.queries.push_back(render_query(q));
      row.answers.push_back(render_answer(params, q));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_table(const SystemParams& params, int k, const std::vector<TableRow>& rows) {
  std::vector<std::string> header{"P(F)", "F"};
  for (int n = 1; n <= params.num_servers(); ++n) {
    header.push_back("Q" + std::to_string(n));
    header.push_back("A" + std::to_string(n));
  }
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& row : rows) {
    std::vector<std::string> line{row.probability_class, row.key};
    for (std::size_t n = 0; n < row.queries.size(); ++n) {
      line.push_back(row.queries[n]);
      line.push_back(row.answers[n]);
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], display_width(line[c]));
  }

  std::ostringstream os;
  os << "# retrieval of message " << k << " (N=" << params.num_servers() << ", K=" << params.num_messages()
     << ")\n";
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      os << (c == 0 ? "" : "  ") << (c + 1 == line.size() ? line[c] : pad(line[c], width[c]));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wpir
