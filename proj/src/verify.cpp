#include "wpir/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wpir/leakage.hpp"
#include "wpir/optimizer.hpp"
#include "wpir/rng.hpp"
#include "wpir/scheme.hpp"

namespace wpir {

namespace {

constexpr double kTolerance = 1e-9;
constexpr int kRandomDistributions = 20;

std::string describe(double worst, double tol) {
  std::ostringstream os;
  os.precision(3);
  os << "max error " << std::scientific << worst << " (tolerance " << tol << ")";
  return os.str();
}

CheckResult check_decoding(const SystemParams& params, std::uint64_t seed) {
  const WpirScheme scheme(params, uniform_tsc_distribution(params));
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::vector<Answer> answers(static_cast<std::size_t>(params.num_servers()));
  for (std::uint64_t fill = 0; fill < 3; ++fill) {
    const MessageStore store = MessageStore::random(params, seed + fill);
    for_each_key(params, [&](const RandomKey& key) {
      for (int k = 1; k <= params.num_messages(); ++k) {
        for (int n = 1; n <= params.num_servers(); ++n) {
          answers[static_cast<std::size_t>(n - 1)] = wpir_answer(scheme, wpir_query(scheme, k, key, n), store);
        }
        ++trials;
        if (wpir_decode(scheme, k, key, answers) != store.message(k)) ++failures;
      }
    });
  }
  return {"decode_exhaustive", failures == 0,
          std::to_string(trials - failures) + "/" + std::to_string(trials) + " retrievals recovered"};
}

CheckResult check_symmetry(const SystemParams& params, Rng& rng) {
  const WpirScheme scheme(params, random_mixed_distribution(params, rng));
  const bool ok = server_symmetric(scheme);
  return {"server_symmetry", ok, ok ? "all servers see the same query law" : "query laws differ across servers"};
}

CheckResult check_download(const SystemParams& params, Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const WpirScheme scheme(params, random_mixed_distribution(params, rng));
    const double closed = download_cost(scheme).cost;
    for (int k = 1; k <= params.num_messages(); ++k) {
      double expected = 0.0;
      for_each_key(params, [&](const RandomKey& key) {
        int symbols = 0;
        for (int n = 1; n <= params.num_servers(); ++n) {
          symbols += answer_length(params, wpir_query(scheme, k, key, n));
        }
        expected += key_probability(scheme.distribution(), key) * symbols;
      });
      worst = std::max(worst, std::abs(expected / params.message_length() - closed));
    }
  }
  return {"download_cost_enumeration", worst <= kTolerance, describe(worst, kTolerance)};
}

CheckResult check_analytic_leakage(const SystemParams& params, Rng& rng) {
  double worst_mi = 0.0;
  double worst_maxl = 0.0;
  for (int trial = 0; trial < kRandomDistributions; ++trial) {
    const WpirScheme scheme(params, random_tsc_distribution(params, rng));
    const QueryLaw law = enumerate_query_law(scheme, 1);
    const auto& p = scheme.distribution().p_weights;
    worst_mi = std::max(worst_mi, std::abs(analytic_mi(params, p) - mutual_info_leakage(law)));
    worst_maxl = std::max(worst_maxl, std::abs(analytic_maxl(params, p) - maximal_leakage(law)));
  }
  const double worst = std::max(worst_mi, worst_maxl);
  return {"analytic_vs_enumerated_leakage", worst <= kTolerance, describe(worst, kTolerance)};
}

CheckResult check_maxl_solution(const SystemParams& params) {
  const double cap = maxl_leakage_cap(params);
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double rho = 1.2 * cap * i / 10;
    const WpirScheme scheme(params, solve_maxl(params, rho));
    const double leak = maximal_leakage(enumerate_query_law(scheme, 1));
    worst = std::max(worst, std::abs(leak - std::min(rho, cap)));
    worst = std::max(worst, std::abs(download_cost(scheme).cost - maxl_download_bound(params, rho)));
  }
  return {"maxl_solution", worst <= kTolerance, describe(worst, kTolerance)};
}

CheckResult check_mi_extreme(const SystemParams& params) {
  const WpirScheme scheme(params, direct_only_distribution(params));
  const double leak = mutual_info_leakage(enumerate_query_law(scheme, 1));
  const double expected = std::log2(static_cast<double>(params.num_messages())) / params.num_servers();
  const double err = std::abs(leak - expected);
  return {"mi_direct_extreme", err <= kTolerance, describe(err, kTolerance)};
}

CheckResult check_kkt(const SystemParams& params) {
  constexpr double kKktTolerance = 1e-6;
  double worst = 0.0;
  double worst_enum = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x_last = std::pow(1e6, i / 9.0);
    const PatternDistribution dist = p_from_x(params, solve_x_recursion(params, x_last));
    worst = std::max(worst, kkt_residual(params, dist).stationarity);
    const WpirScheme scheme(params, dist);
    worst_enum = std::max(worst_enum, std::abs(mi_point(params, x_last).rho -
                                               mutual_info_leakage(enumerate_query_law(scheme, 1))));
  }
  const bool ok = worst <= kKktTolerance && worst_enum <= kTolerance;
  return {"kkt_stationarity", ok,
          describe(worst, kKktTolerance) + "; curve vs enumeration " + describe(worst_enum, kTolerance)};
}

}  // namespace

PatternDistribution random_tsc_distribution(const SystemParams& params, Rng& rng) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  Eigen::VectorXd raw(params.num_messages());
  for (auto& w : raw) w = weight(rng);
  return normalized_tsc_distribution(params, raw);
}

PatternDistribution random_mixed_distribution(const SystemParams& params, Rng& rng) {
  PatternDistribution dist = random_tsc_distribution(params, rng);
  const double theta = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  dist.p_weights *= 1.0 - theta;
  dist.p_direct = theta / params.num_servers();
  return dist;
}

std::vector<CheckResult> run_verification(const SystemParams& params, std::uint64_t seed) {
  if (params.tsc_key_count() > kEnumerationLimit) {
    throw TooLarge("N^K = " + std::to_string(params.tsc_key_count()) + " exceeds the enumeration limit of " +
                   std::to_string(kEnumerationLimit));
  }
  Rng rng = make_stream(seed, 1);
  std::vector<CheckResult> results;
  results.push_back(check_decoding(params, seed));
  results.push_back(check_symmetry(params, rng));
  results.push_back(check_download(params, rng));
  results.push_back(check_analytic_leakage(params, rng));
  results.push_back(check_maxl_solution(params));
  results.push_back(check_mi_extreme(params));
  results.push_back(check_kkt(params));
  return results;
}

}  // namespace wpir
