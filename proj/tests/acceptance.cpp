// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Optional argv[1] is the path of the wpir executable, used
// for the table criterion; without it the library table is checked instead.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "golden_table.hpp"
#include "oracles.hpp"
#include "wpir/leakage.hpp"
#include "wpir/optimizer.hpp"
#include "wpir/rng.hpp"
#include "wpir/scheme.hpp"
#include "wpir/sim.hpp"
#include "wpir/table.hpp"
#include "wpir/verify.hpp"

using namespace wpir;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  std::set<std::string> seen;

  void require(bool ok, const std::string& what) {
    if (!ok && seen.insert(what).second) {
      if (!passed) detail << "; ";
      detail << what;
      passed = false;
    }
  }
};

std::string cli_path;

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe.get())) out.append(buf.data(), n);
  status = pclose(pipe.release());
  return out;
}

std::multiset<golden::Row> library_table(int k) {
  const SystemParams p(3, 2);
  return golden::parse_dump(format_table(p, k, query_table(p, k)));
}

void table(Outcome& o) {
  for (int k : {1, 2}) {
    std::multiset<golden::Row> got;
    if (cli_path.empty()) {
      got = library_table(k);
    } else {
      int status = 0;
      got = golden::parse_dump(run_command(cli_path + " dump-table -N 3 -K 2 -k " + std::to_string(k), status));
      o.require(status == 0, "dump-table exited with " + std::to_string(status));
    }
    const auto& expected = k == 1 ? golden::kRetrieveFirst : golden::kRetrieveSecond;
    o.require(got == golden::as_set(expected), "row set for message " + std::to_string(k) + " differs");
  }
  o.detail << (cli_path.empty() ? "library table" : "via " + cli_path) << ", 12 rows x 2";
}

void capacity(Outcome& o) {
  for (auto [n, k] : {std::pair{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 3}, {3, 4}}) {
    const SystemParams p(n, k);
    const double expected = (1 - std::pow(n, -k)) / (1 - 1.0 / n);
    const double maxl = download_cost(WpirScheme(p, solve_maxl(p, 0.0))).cost;
    const double mi = mi_point(p, 1.0).download;
    o.require(std::abs(maxl - expected) <= 1e-9 && std::abs(mi - expected) <= 1e-9,
              "N=" + std::to_string(n) + " K=" + std::to_string(k));
  }
  const SystemParams p(3, 2);
  const double d = mi_point(p, 1.0).download;
  o.require(std::abs(d - 4.0 / 3) <= 1e-9, "N=3 K=2 not 4/3");
  o.detail << "N=3 K=2: D=" << d;
}

void maxl_solution(Outcome& o) {
  double worst_leak = 0.0, worst_cost = 0.0;
  for (int n : {2, 3, 4}) {
    for (int k : {2, 3, 4}) {
      const SystemParams p(n, k);
      const double cap = maxl_leakage_cap(p);
      for (int i = 0; i < 20; ++i) {
        const double rho = cap * i / 19.0;
        const WpirScheme scheme(p, solve_maxl(p, rho));
        const double leak = maximal_leakage(enumerate_query_law(scheme, 1));
        worst_leak = std::max(worst_leak, std::abs(leak - std::min(rho, cap)));
        worst_cost = std::max(worst_cost, std::abs(download_cost(scheme).cost - maxl_download_bound(p, rho)));
      }
    }
  }
  o.require(worst_leak <= 1e-9, "leakage mismatch");
  o.require(worst_cost <= 1e-9, "download mismatch");
  o.detail << "max |leak err|=" << worst_leak << ", max |D err|=" << worst_cost;
}

void min_download(Outcome& o) {
  const SystemParams p(3, 2);
  const WpirScheme ours(p, direct_only_distribution(p));
  Eigen::VectorXd legacy_p = Eigen::VectorXd::Zero(2);
  legacy_p(0) = 1.0 / 3;
  const WpirScheme legacy(p, PatternDistribution{0.0, legacy_p});
  const double a = oracle::maximal_leakage(oracle::query_law(ours, 1));
  const double b = oracle::maximal_leakage(oracle::query_law(legacy, 1));
  o.require(std::abs(download_cost(ours).cost - 1.0) <= 1e-12, "direct scheme D != 1");
  o.require(std::abs(download_cost(legacy).cost - 1.0) <= 1e-12, "legacy scheme D != 1");
  o.require(std::abs(a - std::log2((2 + 3 - 1) / 3.0)) <= 1e-9, "direct leakage off");
  o.require(std::abs(b - std::log2((1 + 2 * 2) / 3.0)) <= 1e-9, "legacy leakage off");
  o.require(a < b, "no improvement");
  o.detail << "direct " << a << " bits vs legacy " << b << " bits";
}

void mi_extreme(Outcome& o) {
  for (auto [n, k] : {std::pair{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 3}, {3, 4}}) {
    const SystemParams p(n, k);
    const double mi = mutual_info_leakage(enumerate_query_law(WpirScheme(p, direct_only_distribution(p)), 1));
    o.require(std::abs(mi - std::log2(double(k)) / n) <= 1e-9, "N=" + std::to_string(n) + " K=" + std::to_string(k));
  }
  const SystemParams p(3, 2);
  o.detail << "N=3 K=2: " << mutual_info_leakage(enumerate_query_law(WpirScheme(p, direct_only_distribution(p)), 1))
           << " bits";
}

void mi_equivalence(Outcome& o) {
  Rng rng = make_stream(kDefaultSeed, 6);
  double worst = 0.0;
  int count = 0;
  for (int n : {2, 3}) {
    for (int k : {2, 3, 4}) {
      const SystemParams p(n, k);
      for (int i = 0; i < 100; ++i, ++count) {
        const auto dist = random_tsc_distribution(p, rng);
        const double enumerated = mutual_info_leakage(enumerate_query_law(WpirScheme(p, dist), 1));
        worst = std::max(worst, std::abs(analytic_mi(p, dist.p_weights) - enumerated));
      }
    }
  }
  o.require(worst <= 1e-9, "mismatch");
  o.detail << count << " distributions, max |diff|=" << worst;
}

void kkt(Outcome& o) {
  double worst = 0.0, weakest_bump = std::numeric_limits<double>::infinity();
  for (int n : {2, 3, 4}) {
    for (int k : {3, 4}) {
      const SystemParams p(n, k);
      for (int i = 0; i < 20; ++i) {
        const double x_last = std::pow(1e6, i / 19.0);
        PatternDistribution dist;
        try {
          dist = p_from_x(p, solve_x_recursion(p, x_last));
        } catch (const OutOfRange& e) {
          o.require(false, e.what());
          continue;
        }
        worst = std::max(worst, kkt_residual(p, dist).stationarity);
        for (int w = 0; w < k; ++w) {
          auto bumped = dist;
          bumped.p_weights(w) *= 1.01;
          weakest_bump = std::min(weakest_bump, kkt_residual(p, bumped).stationarity);
        }
      }
    }
  }
  o.require(worst <= 1e-6, "stationarity residual too large");
  o.require(weakest_bump > 1e-3, "perturbation left the point stationary");
  o.detail << "N in {2,3,4}, K in {3,4}: max residual " << worst << ", min perturbed residual " << weakest_bump;
}

void tangency(Outcome& o) {
  const SystemParams p(3, 2);
  constexpr int kGrid = 1000;
  auto all = mi_sweep(p, kGrid);
  all.push_back(direct_extreme_point(p, Metric::MI));
  const auto tangent = envelope_tangent(lower_convex_envelope(std::move(all)));
  if (!tangent) {
    o.require(false, "envelope never leaves the swept curve");
    return;
  }
  const double target = 1.0 / (std::sqrt(2.0) - 1.0);
  const auto grid = x_grid(kGrid);
  const auto hi = std::upper_bound(grid.begin(), grid.end(), target);
  const double cell = *hi - *(hi - 1);
  const double x = *tangent->provenance.x_last;
  o.require(std::abs(x - target) <= cell, "tangent too far from 2.414214");
  o.detail << "grid tangent x1=" << x << ", target " << target << ", cell width " << cell;
}

void exhaustive_decode(Outcome& o) {
  std::uint64_t total = 0, ok = 0;
  for (int n : {2, 3}) {
    for (int k : {2, 3}) {
      const SystemParams p(n, k);
      PatternDistribution dist = uniform_tsc_distribution(p);
      dist.p_weights *= 0.5;
      dist.p_direct = 0.5 / n;
      const WpirScheme scheme(p, dist);
      for (std::uint64_t fill = 0; fill < 10; ++fill) {
        const auto store = MessageStore::random(p, 1000 + fill);
        for_each_key(p, [&](const RandomKey& key) {
          for (int m = 1; m <= k; ++m) {
            std::vector<Answer> answers;
            for (int s = 1; s <= n; ++s) answers.push_back(wpir_answer(scheme, wpir_query(scheme, m, key, s), store));
            ++total;
            ok += wpir_decode(scheme, m, key, answers) == store.message(m);
          }
        });
      }
    }
  }
  o.require(ok == total, std::to_string(total - ok) + " failures");
  o.detail << ok << "/" << total << " retrievals";
}

void monte_carlo(Outcome& o) {
  const SystemParams p(3, 2);
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<std::pair<std::string, PatternDistribution>> schemes{
      {"uniform", uniform_tsc_distribution(p)},
      {"maxl(0.2)", solve_maxl(p, 0.2)},
      {"direct", direct_only_distribution(p)}};
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const auto& [name, dist] = schemes[i];
    const auto r = run_simulation({WpirScheme(p, dist), 100'000, kDefaultSeed + i, kDefaultSeed, threads});
    const double gap = std::abs(r.empirical_download - r.theoretical_download);
    o.require(r.success_rate == 1.0, name + " decoding failed");
    o.require(gap <= 3 * r.download_stderr + 1e-12, name + " download off by " + std::to_string(gap));
    o.require(r.freq_within_bound, name + " query frequencies outside 4 sigma");
    o.detail << (i ? ", " : "") << name << " D=" << r.empirical_download << "+-" << r.download_stderr;
  }
}

bool convex_nonincreasing(const std::vector<TradeoffPoint>& c, std::string& why) {
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i].rho < c[i - 1].rho || c[i].download > c[i - 1].download) {
      why = "not nonincreasing at rho=" + std::to_string(c[i].rho);
      return false;
    }
  }
  for (std::size_t i = 2; i < c.size(); ++i) {
    const double s1 = (c[i - 1].download - c[i - 2].download) / (c[i - 1].rho - c[i - 2].rho);
    const double s2 = (c[i].download - c[i - 1].download) / (c[i].rho - c[i - 1].rho);
    if (s2 < s1 - 1e-9) {
      std::ostringstream os;
      os << "slope drops from " << s1 << " to " << s2 << " at rho=" << c[i - 1].rho;
      why = os.str();
      return false;
    }
  }
  return true;
}

void curve_shape(Outcome& o) {
  constexpr int kPoints = 100;
  for (auto [n, k] : {std::pair{3, 2}, {3, 3}, {4, 2}}) {
    const SystemParams p(n, k);
    const std::string tag = "N=" + std::to_string(n) + " K=" + std::to_string(k) + " ";
    std::string why;

    const auto mi = mi_curve(p, kPoints);
    const bool mi_ok = convex_nonincreasing(mi, why);
    o.require(mi_ok, tag + "mi curve: " + why);
    const auto maxl = maxl_curve(p, kPoints);
    const bool maxl_ok = convex_nonincreasing(maxl, why);
    o.require(maxl_ok, tag + "maxl curve: " + why);

    const auto tsc_only = lower_convex_envelope(mi_sweep(p, kPoints));
    const auto tangent = envelope_tangent(mi);
    if (!tangent) {
      o.require(false, tag + "no tangent point");
      continue;
    }
    int below = 0, above = 0;
    for (const auto& pt : mi) {
      const double base = envelope_download_at(tsc_only, pt.rho);
      if (pt.rho <= tangent->rho) {
        ++below;
        o.require(std::abs(pt.download - base) <= 1e-12, tag + "mi curve departs below the tangent");
      } else {
        ++above;
        o.require(pt.download < base, tag + "mi curve not strictly lower above the tangent");
      }
    }
    o.require(below > 0 && above > 0, tag + "grid does not straddle the tangent");
  }
  if (o.passed) o.detail << "mi and maxl curves convex and nonincreasing; mi curve splits at the tangent";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cli_path = argv[1];
  std::cout.precision(10);

  struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds, 0 = none
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "golden table", 1.0, table},
      {2, "capacity endpoint", 0, capacity},
      {3, "maximal-leakage solution vs enumeration", 10.0, maxl_solution},
      {4, "minimum-download leakage improvement", 0, min_download},
      {5, "MI extreme point", 0, mi_extreme},
      {6, "analytic vs enumerated MI", 30.0, mi_equivalence},
      {7, "KKT stationarity", 0, kkt},
      {8, "tangency", 0, tangency},
      {9, "exhaustive decoding", 0, exhaustive_decode},
      {10, "Monte-Carlo consistency", 20.0, monte_carlo},
      {11, "curve shape", 0, curve_shape},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0) o.require(secs < c.time_limit, "over the " + std::to_string(c.time_limit) + " s limit");
    failed += !o.passed;
    std::ostringstream t;
    t.precision(3);
    t << std::fixed << secs;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << c.id << " " << c.name << " (" << t.str()
              << " s): " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
