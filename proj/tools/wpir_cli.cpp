// Command-line front end: tradeoff curves, Monte-Carlo simulation,
// exhaustive self-verification and query-table dumps.
//
// Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wpir/io.hpp"
#include "wpir/leakage.hpp"
#include "wpir/optimizer.hpp"
#include "wpir/rng.hpp"
#include "wpir/scheme.hpp"
#include "wpir/sim.hpp"
#include "wpir/table.hpp"
#include "wpir/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string metric = "maxl";
  int servers = 3;
  int messages = 2;
  int points = 100;
  std::string out;
  std::string baseline_out;
  std::string format = "csv";
  std::uint64_t seed = wpir::kDefaultSeed;
  std::uint64_t message_seed = wpir::kDefaultSeed + 1;
  std::uint64_t trials = 100'000;
  unsigned threads = 1;
  std::string scheme_file;
  std::optional<double> rho;
  int message = 1;
};

wpir::SystemParams make_params(const Options& opt) {
  try {
    return wpir::SystemParams(opt.servers, opt.messages);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Writes to the file at `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string render_curve(const std::vector<wpir::TradeoffPoint>& curve, const Options& opt) {
  std::ostringstream os;
  if (opt.format == "json") {
    os << wpir::to_json(curve).dump(2) << '\n';
  } else {
    wpir::write_curve_csv(os, curve, opt.messages);
  }
  return os.str();
}

int cmd_curve(const Options& opt) {
  const auto params = make_params(opt);
  if (opt.points < 2) throw UsageError("--points must be at least 2 (grid_size >= 2)");
  const auto metric = wpir::metric_from_string(opt.metric);

  const auto curve = metric == wpir::Metric::MaxL ? wpir::maxl_curve(params, opt.points)
                                                  : wpir::mi_curve(params, opt.points);
  emit(opt.out, render_curve(curve, opt));
  if (!opt.baseline_out.empty()) {
    const auto baseline = metric == wpir::Metric::MaxL ? wpir::maxl_baseline_curve(params, opt.points)
                                                       : wpir::mi_sweep(params, opt.points);
    emit(opt.baseline_out, render_curve(baseline, opt));
  }
  return kExitOk;
}

wpir::WpirScheme load_scheme(const Options& opt) {
  if (!opt.scheme_file.empty()) {
    std::ifstream file(opt.scheme_file);
    if (!file) throw std::runtime_error("cannot open scheme file '" + opt.scheme_file + "'");
    try {
      return wpir::scheme_from_json(wpir::Json::parse(file));
    } catch (const wpir::Json::exception& e) {
      throw UsageError(std::string("malformed scheme file: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("invalid scheme file: ") + e.what());
    }
  }
  if (!opt.rho) throw UsageError("give either --scheme FILE or --rho with --metric");
  if (*opt.rho < 0.0) throw UsageError("--rho must be nonnegative");
  const auto params = make_params(opt);
  const auto metric = wpir::metric_from_string(opt.metric);
  return wpir::WpirScheme(params, metric == wpir::Metric::MaxL ? wpir::solve_maxl(params, *opt.rho)
                                                               : wpir::solve_mi(params, *opt.rho));
}

int cmd_simulate(const Options& opt) {
  if (opt.trials < 1) throw UsageError("--trials must be at least 1");
  const auto scheme = load_scheme(opt);
  const wpir::SimConfig config{scheme, opt.trials, opt.seed, opt.message_seed, opt.threads};
  const auto report = wpir::run_simulation(config);
  wpir::Json out = wpir::to_json(report, scheme.params());
  out["scheme"] = wpir::to_json(scheme);
  emit(opt.out, out.dump(2) + "\n");
  return report.success_rate == 1.0 ? kExitOk : kExitFailure;
}

int cmd_leakage(const Options& opt) {
  const auto scheme = load_scheme(opt);
  wpir::Json out = {{"scheme", wpir::to_json(scheme)},
                    {"download_cost", wpir::download_cost(scheme).cost},
                    {"maxl", wpir::to_json(wpir::leakage_report(scheme, wpir::Metric::MaxL))},
                    {"mi", wpir::to_json(wpir::leakage_report(scheme, wpir::Metric::MI))}};
  emit(opt.out, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_verify(const Options& opt) {
  const auto params = make_params(opt);
  std::vector<wpir::CheckResult> results;
  try {
    results = wpir::run_verification(params, opt.seed);
  } catch (const wpir::TooLarge& e) {
    throw UsageError(std::string("TooLarge: ") + e.what());
  }
  const wpir::CheckResult* first_failure = nullptr;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    if (!r.passed && !first_failure) first_failure = &r;
  }
  if (first_failure) {
    std::cerr << "verification failed: " << first_failure->name << '\n';
    return kExitFailure;
  }
  std::cout << "all checks passed for N=" << opt.servers << ", K=" << opt.messages << '\n';
  return kExitOk;
}

int cmd_dump_table(const Options& opt) {
  const auto params = make_params(opt);
  if (opt.message < 1 || opt.message > opt.messages) throw UsageError("--message must be in 1:K");
  std::vector<wpir::TableRow> rows;
  try {
    rows = wpir::query_table(params, opt.message);
  } catch (const wpir::TooLarge& e) {
    throw UsageError(e.what());
  }
  emit(opt.out, wpir::format_table(params, opt.message, rows));
  return kExitOk;
}

void add_instance_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("-N,--servers", opt.servers, "number of servers N")->capture_default_str();
  cmd->add_option("-K,--messages", opt.messages, "number of messages K")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly-private information retrieval: tradeoff curves, simulation and verification"};
  app.require_subcommand(1);
  Options opt;

  auto* curve = app.add_subcommand("curve", "emit a (leakage, download) tradeoff curve");
  curve->add_option("--metric", opt.metric, "maxl or mi")->check(CLI::IsMember({"maxl", "mi"}))->capture_default_str();
  add_instance_options(curve, opt);
  curve->add_option("--points", opt.points, "grid size")->capture_default_str();
  curve->add_option("-o,--out", opt.out, "output file (default stdout)");
  curve->add_option("--baseline-out", opt.baseline_out, "also write the curve without the direct pattern here");
  curve->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  curve->add_option("--seed", opt.seed, "random seed (curves are deterministic)")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo retrieval against in-process servers");
  simulate->add_option("--scheme", opt.scheme_file, "scheme JSON file {\"N\",\"K\",\"dist\"}");
  simulate->add_option("--metric", opt.metric, "optimize for maxl or mi")->check(CLI::IsMember({"maxl", "mi"}))->capture_default_str();
  simulate->add_option("--rho", opt.rho, "leakage budget in bits");
  add_instance_options(simulate, opt);
  simulate->add_option("--trials", opt.trials, "number of retrievals")->capture_default_str();
  simulate->add_option("--seed", opt.seed, "master seed")->capture_default_str();
  simulate->add_option("--message-seed", opt.message_seed, "seed for the stored messages")->capture_default_str();
  simulate->add_option("--threads", opt.threads, "worker threads")->capture_default_str();
  simulate->add_option("-o,--out", opt.out, "output file (default stdout)");

  auto* leakage = app.add_subcommand("leakage", "exact leakage of a scheme under both metrics");
  leakage->add_option("--scheme", opt.scheme_file, "scheme JSON file");
  leakage->add_option("--metric", opt.metric, "optimize for maxl or mi")->check(CLI::IsMember({"maxl", "mi"}))->capture_default_str();
  leakage->add_option("--rho", opt.rho, "leakage budget in bits");
  add_instance_options(leakage, opt);
  leakage->add_option("-o,--out", opt.out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "exhaustive self-checks for one (N, K)");
  add_instance_options(verify, opt);
  verify->add_option("--seed", opt.seed, "seed for sampled distributions")->capture_default_str();

  auto* dump = app.add_subcommand("dump-table", "print every key's queries and symbolic answers");
  add_instance_options(dump, opt);
  dump->add_option("-k,--message", opt.message, "requested message k")->capture_default_str();
  dump->add_option("-o,--out", opt.out, "output file (default stdout)");
  dump->add_option("--seed", opt.seed, "unused; accepted for uniformity")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*curve) return cmd_curve(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*leakage) return cmd_leakage(opt);
    if (*verify) return cmd_verify(opt);
    if (*dump) return cmd_dump_table(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
