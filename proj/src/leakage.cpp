#include "wpir/leakage.hpp"

#include <algorithm>
#include <cmath>

namespace wpir {

namespace {

std::uint64_t checked_tsc_count(const SystemParams& params) {
  const std::uint64_t count = params.tsc_key_count();
  if (count > (std::uint64_t{1} << 62)) throw TooLarge("N^K does not fit a query index");
  return count;
}

void guard_enumeration(const SystemParams& params) {
  const std::uint64_t count = params.tsc_key_count();
  if (count > kEnumerationLimit) {
    throw TooLarge("N^K = " + std::to_string(count) + " exceeds the enumeration limit of " +
                   std::to_string(kEnumerationLimit));
  }
  const auto k = static_cast<std::uint64_t>(params.num_messages());
  if ((count + k) * k > kLawEntryLimit) {
    throw TooLarge("query law with " + std::to_string((count + k) * k) +
                   " entries exceeds the memory limit");
  }
}

double xlog2x_ratio(double p, double mean) { return p > 0.0 ? p * std::log2(p / mean) : 0.0; }

}  // namespace

std::uint64_t query_index(const SystemParams& params, const Query& query) {
  const std::uint64_t count = checked_tsc_count(params);
  if (const auto* request = std::get_if<DirectRequest>(&query)) {
    return count + static_cast<std::uint64_t>(request->message - 1);
  }
  std::uint64_t index = 0;
  for (int d : std::get<QueryVector>(query).digits) {
    index = index * static_cast<std::uint64_t>(params.num_servers()) + static_cast<std::uint64_t>(d);
  }
  return index;
}

Query query_at(const SystemParams& params, std::uint64_t index) {
  const std::uint64_t count = checked_tsc_count(params);
  if (index >= count) {
    const auto k = static_cast<int>(index - count) + 1;
    if (k > params.num_messages()) throw std::out_of_range("query index past #_K");
    return DirectRequest{k};
  }
  const auto n = static_cast<std::uint64_t>(params.num_servers());
  QueryVector q{std::vector<int>(static_cast<std::size_t>(params.num_messages()), 0)};
  for (auto it = q.digits.rbegin(); it != q.digits.rend(); ++it) {
    *it = static_cast<int>(index % n);
    index /= n;
  }
  return q;
}

QueryLaw enumerate_query_law(const WpirScheme& scheme, int n) {
  const auto& params = scheme.params();
  if (n < 1 || n > params.num_servers()) throw std::invalid_argument("server index must be in 1:N");
  guard_enumeration(params);

  const int servers = params.num_servers();
  const int messages = params.num_messages();
  const auto tsc_count = static_cast<Eigen::Index>(params.tsc_key_count());
  const auto& dist = scheme.distribution();

  QueryLaw law{params, n, Eigen::MatrixXd::Zero(tsc_count + messages, messages)};

  // Place values of each query position, most significant first.
  std::vector<Eigen::Index> place(static_cast<std::size_t>(messages));
  Eigen::Index scale = 1;
  for (int m = messages - 1; m >= 0; --m) {
    place[static_cast<std::size_t>(m)] = scale;
    scale *= servers;
  }

  // TSC keys in lexicographic order of (F*_1..F*_{K-1}, U).
  std::vector<int> digits(static_cast<std::size_t>(messages), 0);
  for (Eigen::Index key = 0; key < tsc_count; ++key) {
    int weight = 0;
    for (int j = 0; j + 1 < messages; ++j) weight += digits[static_cast<std::size_t>(j)] != 0;
    const double p = dist.p_weights(weight);
    const int desired = (digits.back() + n) % servers;
    for (int k = 1; k <= messages; ++k) {
      Eigen::Index row = 0;
      for (int m = 1, j = 0; m <= messages; ++m) {
        const int d = m == k ? desired : digits[static_cast<std::size_t>(j++)];
        row += d * place[static_cast<std::size_t>(m - 1)];
      }
      law.conditional(row, k - 1) += p;
    }
    for (int pos = messages - 1; pos >= 0; --pos) {
      if (++digits[static_cast<std::size_t>(pos)] < servers) break;
      digits[static_cast<std::size_t>(pos)] = 0;
    }
  }

  // Direct keys: #_k from the chosen server, 0_K from every other one.
  for (int k = 1; k <= messages; ++k) {
    law.conditional(tsc_count + k - 1, k - 1) += dist.p_direct;
    law.conditional(0, k - 1) += (servers - 1) * dist.p_direct;
  }
  return law;
}

bool server_symmetric(const WpirScheme& scheme) {
  const QueryLaw first = enumerate_query_law(scheme, 1);
  for (int n = 2; n <= scheme.params().num_servers(); ++n) {
    if (enumerate_query_law(scheme, n).conditional != first.conditional) return false;
  }
  return true;
}

double maximal_leakage(const Eigen::Ref<const Eigen::MatrixXd>& conditional) {
  return std::max(0.0, std::log2(conditional.rowwise().maxCoeff().sum()));
}

double maximal_leakage(const QueryLaw& law) { return maximal_leakage(law.conditional); }

double mutual_info_leakage(const Eigen::Ref<const Eigen::MatrixXd>& conditional) {
  const Eigen::VectorXd mean = conditional.rowwise().mean();
  const auto cols = static_cast<double>(conditional.cols());
  double total = 0.0;
  for (Eigen::Index q = 0; q < conditional.rows(); ++q) {
    if (mean(q) <= 0.0) continue;
    for (Eigen::Index k = 0; k < conditional.cols(); ++k) {
      total += xlog2x_ratio(conditional(q, k), mean(q));
    }
  }
  return std::max(0.0, total / cols);
}

double mutual_info_leakage(const QueryLaw& law) { return mutual_info_leakage(law.conditional); }

double analytic_mi(const SystemParams& params, const Eigen::Ref<const Eigen::VectorXd>& p_weights) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  if (p_weights.size() != k) throw std::invalid_argument("p_weights must have K entries");
  auto p = [&](int w) { return w < 0 || w >= k ? 0.0 : p_weights(w); };

  // Each brace term is written as a relative entropy against the mean
  // (w p_{w-1} + (K-w) p_w)/K, which stays accurate near the uniform point.
  double total = 0.0;
  for (int w = 0; w <= k; ++w) {
    const double hit = p(w - 1);
    const double miss = p(w);
    const double mean = (w * hit + (k - w) * miss) / k;
    if (mean <= 0.0) continue;
    double term = 0.0;
    if (w > 0 && hit > 0.0) term += w * hit * std::log(hit / mean);
    if (w < k && miss > 0.0) term += (k - w) * miss * std::log(miss / mean);
    total += binomial(k, w) * std::pow(n - 1.0, w) * term;
  }
  return std::max(0.0, total / k / std::log(2.0));
}

std::string to_string(Metric metric) { return metric == Metric::MaxL ? "maxl" : "mi"; }

Metric metric_from_string(const std::string& name) {
  if (name == "maxl") return Metric::MaxL;
  if (name == "mi") return Metric::MI;
  throw std::invalid_argument("unknown metric '" + name + "' (expected maxl or mi)");
}

LeakageReport leakage_report(const WpirScheme& scheme, Metric metric) {
  LeakageReport report{metric, 0.0, {}};
  for (int n = 1; n <= scheme.params().num_servers(); ++n) {
    const QueryLaw law = enumerate_query_law(scheme, n);
    report.per_server.push_back(metric == Metric::MaxL ? maximal_leakage(law) : mutual_info_leakage(law));
  }
  report.value = *std::max_element(report.per_server.begin(), report.per_server.end());
  return report;
}

}  // namespace wpir
