#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wpir/core.hpp"
#include "wpir/scheme.hpp"

namespace wpir {

/// Largest N^K for which exhaustive enumeration is attempted.
inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;
/// Largest number of entries in a query-law matrix ((N^K + K) * K).
inline constexpr std::uint64_t kLawEntryLimit = 64'000'000;

/// Canonical row index of a query: base-N value of the digit vector (first
/// digit most significant) for vectors, N^K + k - 1 for #_k. Row order is the
/// sort order of the (tag, digits) byte strings.
std::uint64_t query_index(const SystemParams& params, const Query& query);
Query query_at(const SystemParams& params, std::uint64_t index);

/// Conditional law P(Q_n = q | M = k) seen by one server. Rows are queries
/// in canonical order, columns are messages 1..K.
struct QueryLaw {
  SystemParams params;
  int server;
  Eigen::MatrixXd conditional;
};

/// Exact law by exhaustive key enumeration. Throws TooLarge past the limits.
QueryLaw enumerate_query_law(const WpirScheme& scheme, int n);

/// True when every server sees exactly the same law.
bool server_symmetric(const WpirScheme& scheme);

/// log2 sum_q max_k P(q | k), in bits.
double maximal_leakage(const Eigen::Ref<const Eigen::MatrixXd>& conditional);
double maximal_leakage(const QueryLaw& law);

/// I(M; Q) with M uniform over the columns, in bits. 0 log 0 = 0.
double mutual_info_leakage(const Eigen::Ref<const Eigen::MatrixXd>& conditional);
double mutual_info_leakage(const QueryLaw& law);

/// Closed-form mutual information of a TSC-only distribution, in bits:
/// the query weight w counts nonzero digits over all K positions, and
/// P(q | k) is p_{w-1} or p_w depending on whether q_k is nonzero.
double analytic_mi(const SystemParams& params, const Eigen::Ref<const Eigen::VectorXd>& p_weights);

enum class Metric { MaxL, MI };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

struct LeakageReport {
  Metric metric;
  double value;                   // bits, max over servers
  std::vector<double> per_server;
};

LeakageReport leakage_report(const WpirScheme& scheme, Metric metric);

}  // namespace wpir
