#include "wpir/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wpir/scheme.hpp"

namespace wpir {

namespace {

double geometric_tail(const SystemParams& params) {
  // 1/N + ... + 1/N^{K-1}
  double sum = 0.0;
  double term = 1.0;
  for (int i = 1; i < params.num_messages(); ++i) {
    term /= params.num_servers();
    sum += term;
  }
  return sum;
}

void require_grid(int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid size must be at least 2");
}

double cross(const TradeoffPoint& o, const TradeoffPoint& a, const TradeoffPoint& b) {
  return (a.rho - o.rho) * (b.download - o.download) - (a.download - o.download) * (b.rho - o.rho);
}

// x_last as a function of the log-grid coordinate.
double x_from_log_offset(double u) {
  return std::clamp(1.0 + std::exp(u) - kGridOffset, 1.0, kXMax);
}

double log_offset_min() { return std::log(kGridOffset); }
double log_offset_max() { return std::log(kXMax - 1.0 + kGridOffset); }

}  // namespace

PatternDistribution solve_maxl(const SystemParams& params, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  const int n = params.num_servers();
  const int k = params.num_messages();
  const double p_direct =
      rho >= maxl_leakage_cap(params) ? 1.0 / n : std::min(1.0 / n, (std::exp2(rho) - 1.0) / (k - 1));
  const double rest = std::max(0.0, 1.0 - n * p_direct);
  return {p_direct, Eigen::VectorXd::Constant(k, rest / static_cast<double>(params.tsc_key_count()))};
}

double maxl_download_bound(const SystemParams& params, double rho) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  const double slack = std::max(0.0, 1.0 - n * (std::exp2(rho) - 1.0) / (k - 1));
  return 1.0 + slack * geometric_tail(params);
}

double maxl_leakage_cap(const SystemParams& params) {
  return std::log2(1.0 + (params.num_messages() - 1.0) / params.num_servers());
}

double analytic_maxl(const SystemParams& params, const Eigen::Ref<const Eigen::VectorXd>& p_weights) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  if (p_weights.size() != k) throw std::invalid_argument("p_weights must have K entries");
  // A query of total weight w is seen with p_{w-1} (k on its support) or
  // p_w (k off its support).
  double total = 0.0;
  for (int w = 0; w <= k; ++w) {
    double best = 0.0;
    if (w >= 1) best = std::max(best, p_weights(w - 1));
    if (w < k) best = std::max(best, p_weights(w));
    total += binomial(k, w) * std::pow(n - 1.0, w) * best;
  }
  return std::max(0.0, std::log2(total));
}

Eigen::VectorXd solve_x_recursion(const SystemParams& params, double x_last) {
  if (!(x_last >= 1.0 && x_last <= kXMax)) {
    throw OutOfRange("x_last must lie in [1, " + std::to_string(kXMax) + "]");
  }
  const int n = params.num_servers();
  const int k = params.num_messages();
  Eigen::VectorXd x(k - 1);  // x(w - 1) holds x_w
  x(k - 2) = x_last;
  const double anchor = std::log(((k - 1) * x_last + 1.0) / k);

  for (int i = 2; i <= k - 1; ++i) {
    double rhs = 0.0;
    double coeff = 1.0;  // (1 - N)^j
    for (int j = 0; j < i; ++j) {
      rhs += coeff * anchor;
      if (j >= 1) rhs -= coeff * std::log(x(k - i + j - 1));
      coeff *= 1.0 - n;
    }
    double next = (k * std::exp(rhs) - i) / (k - i);
    if (!(next >= 1.0 - kXSlack) || !std::isfinite(next)) {
      std::ostringstream os;
      os << "x recursion left the valid branch at x_" << (k - i) << " = " << next
         << " (x_last = " << x_last << ")";
      throw OutOfRange(os.str());
    }
    x(k - i - 1) = std::max(next, 1.0);
  }
  return x;
}

PatternDistribution p_from_x(const SystemParams& params, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  if (x.size() != k - 1) throw std::invalid_argument("x must have K - 1 entries");
  if (!(x.array() >= 1.0).all()) throw OutOfRange("every x component must be at least 1");

  Eigen::VectorXd ratio(k);  // p_w / p_0
  ratio(0) = 1.0;
  for (int w = 1; w < k; ++w) ratio(w) = ratio(w - 1) / x(w - 1);

  double denom = n;
  for (int w = 1; w < k; ++w) denom += n * binomial(k - 1, w) * std::pow(n - 1.0, w) * ratio(w);
  return {0.0, ratio / denom};
}

KktResidual kkt_residual(const SystemParams& params, const PatternDistribution& dist) {
  const int n = params.num_servers();
  const int k = params.num_messages();
  const auto& p = dist.p_weights;
  if (p.size() != k) throw std::invalid_argument("p_weights must have K entries");
  if (!(p.array() > 0.0).all()) throw std::invalid_argument("KKT residual needs every p_w > 0");

  Eigen::VectorXd x(k - 1);
  Eigen::VectorXd y(k - 1);
  for (int w = 1; w < k; ++w) {
    x(w - 1) = p(w - 1) / p(w);
    y(w - 1) = std::log((w * x(w - 1) + k - w) / k);
  }
  const double nu = y(k - 2) / n;

  KktResidual out{0.0, nu, Eigen::VectorXd::Zero(k - 1), y, Eigen::VectorXd::Zero(k - 1)};
  for (int w = 1; w < k; ++w) {
    const double scale = binomial(k - 1, w) * std::pow(n - 1.0, w);
    double inner = -y(w - 1) + n * nu;
    if (w < k - 1) inner += (n - 1.0) * (std::log(x(w)) - y(w));
    out.gradient(w - 1) = scale * inner - out.dual_lambda(w - 1);
  }
  out.stationarity = out.gradient.cwiseAbs().maxCoeff();
  return out;
}

TradeoffPoint mi_point(const SystemParams& params, double x_last) {
  const Eigen::VectorXd x = solve_x_recursion(params, x_last);
  PatternDistribution dist = p_from_x(params, x);
  const int n = params.num_servers();
  TradeoffPoint point;
  point.rho = analytic_mi(params, dist.p_weights);
  point.download = n / (n - 1.0) * (1.0 - dist.p_weights(0));
  point.provenance = {Metric::MI, 0.0, std::move(dist.p_weights), x_last, 0.0};
  return point;
}

TradeoffPoint direct_extreme_point(const SystemParams& params, Metric metric) {
  const PatternDistribution dist = direct_only_distribution(params);
  const double rho = metric == Metric::MI
                         ? std::log2(static_cast<double>(params.num_messages())) / params.num_servers()
                         : maxl_leakage_cap(params);
  return {rho, 1.0, {metric, dist.p_direct, dist.p_weights, std::nullopt, 1.0}};
}

std::vector<double> x_grid(int grid_size) {
  require_grid(grid_size);
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  const double lo = log_offset_min();
  const double hi = log_offset_max();
  for (int i = 0; i < grid_size; ++i) {
    grid[static_cast<std::size_t>(i)] = x_from_log_offset(lo + (hi - lo) * i / (grid_size - 1));
  }
  grid.front() = 1.0;
  grid.back() = kXMax;
  return grid;
}

std::vector<TradeoffPoint> mi_sweep(const SystemParams& params, int grid_size) {
  std::vector<TradeoffPoint> points;
  for (double x : x_grid(grid_size)) points.push_back(mi_point(params, x));
  return points;
}

std::vector<TradeoffPoint> lower_convex_envelope(std::vector<TradeoffPoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.rho < b.rho || (a.rho == b.rho && a.download < b.download);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const auto& a, const auto& b) { return a.rho == b.rho; }),
               points.end());

  std::vector<TradeoffPoint> hull;
  for (auto& p : points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) hull.pop_back();
    hull.push_back(std::move(p));
  }
  const auto lowest = std::min_element(hull.begin(), hull.end(), [](const auto& a, const auto& b) {
    return a.download < b.download;
  });
  if (lowest != hull.end()) hull.erase(lowest + 1, hull.end());
  return hull;
}

double envelope_download_at(const std::vector<TradeoffPoint>& envelope, double rho) {
  if (envelope.empty()) throw std::invalid_argument("empty envelope");
  if (rho <= envelope.front().rho) return envelope.front().download;
  for (std::size_t i = 1; i < envelope.size(); ++i) {
    const auto& a = envelope[i - 1];
    const auto& b = envelope[i];
    if (rho <= b.rho) return a.download + (b.download - a.download) * (rho - a.rho) / (b.rho - a.rho);
  }
  return envelope.back().download;
}

std::optional<TradeoffPoint> envelope_tangent(const std::vector<TradeoffPoint>& envelope) {
  if (envelope.size() < 2 || envelope.back().provenance.sharing_weight != 1.0) return std::nullopt;
  for (auto it = envelope.rbegin(); it != envelope.rend(); ++it) {
    if (it->provenance.sharing_weight == 0.0) return *it;
  }
  return std::nullopt;
}

std::vector<TradeoffPoint> mi_curve(const SystemParams& params, int grid_size) {
  const std::vector<TradeoffPoint> sweep = mi_sweep(params, grid_size);
  const TradeoffPoint extreme = direct_extreme_point(params, Metric::MI);

  std::vector<TradeoffPoint> all = sweep;
  all.push_back(extreme);
  std::vector<TradeoffPoint> curve = lower_convex_envelope(std::move(all));

  // Fill the sharing segment at the sweep's own rho values.
  const auto tangent = envelope_tangent(curve);
  if (tangent && curve.back().rho > tangent->rho) {
    const double span = extreme.rho - tangent->rho;
    const int n = params.num_servers();
    for (const auto& p : sweep) {
      if (!(p.rho > tangent->rho && p.rho < extreme.rho)) continue;
      const double theta = (p.rho - tangent->rho) / span;
      TradeoffPoint shared;
      shared.rho = p.rho;
      shared.download = (1.0 - theta) * tangent->download + theta * extreme.download;
      shared.provenance = {Metric::MI, theta / n, (1.0 - theta) * tangent->provenance.p_weights,
                           tangent->provenance.x_last, theta};
      curve.push_back(std::move(shared));
    }
    std::stable_sort(curve.begin(), curve.end(), [](const auto& a, const auto& b) { return a.rho < b.rho; });
  }
  return curve;
}

TradeoffPoint mi_tangent_point(const SystemParams& params) {
  const TradeoffPoint extreme = direct_extreme_point(params, Metric::MI);
  // The supporting line through the extreme point has the largest
  // (D - 1)/(rho - rho_e) over curve points left of it.
  auto slope = [&](double u) {
    const TradeoffPoint p = mi_point(params, x_from_log_offset(u));
    if (!(p.rho < extreme.rho)) return -std::numeric_limits<double>::infinity();
    return (p.download - extreme.download) / (p.rho - extreme.rho);
  };

  const double lo = log_offset_min();
  const double hi = log_offset_max();
  constexpr int kScan = 2000;
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double v = slope(lo + (hi - lo) * i / kScan);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  // Golden-section refinement inside the neighbouring scan cells.
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = slope(c);
  double fd = slope(d);
  for (int iter = 0; iter < 200 && b - a > 1e-13; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = slope(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = slope(d);
    }
  }
  return mi_point(params, x_from_log_offset(0.5 * (a + b)));
}

PatternDistribution solve_mi(const SystemParams& params, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  const TradeoffPoint extreme = direct_extreme_point(params, Metric::MI);
  if (rho >= extreme.rho) return direct_only_distribution(params);

  const TradeoffPoint tangent = mi_tangent_point(params);
  if (rho <= tangent.rho) {
    // rho grows with x_last along the swept curve.
    double a = 1.0;
    double b = *tangent.provenance.x_last;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = a + 0.5 * (b - a);
      if (mid == a || mid == b) break;
      (mi_point(params, mid).rho <= rho ? a : b) = mid;
    }
    return p_from_x(params, solve_x_recursion(params, a));
  }

  const double theta = (rho - tangent.rho) / (extreme.rho - tangent.rho);
  return {theta / params.num_servers(), (1.0 - theta) * tangent.provenance.p_weights};
}

std::vector<TradeoffPoint> maxl_curve(const SystemParams& params, int grid_size,
                                      std::uint64_t verify_limit) {
  require_grid(grid_size);
  const double cap = maxl_leakage_cap(params);
  const bool verify = params.tsc_key_count() <= verify_limit;
  std::vector<TradeoffPoint> points;
  for (int i = 0; i < grid_size; ++i) {
    const double rho = i == grid_size - 1 ? cap : cap * i / (grid_size - 1);
    PatternDistribution dist = solve_maxl(params, rho);
    TradeoffPoint point{rho, maxl_download_bound(params, rho),
                        {Metric::MaxL, dist.p_direct, dist.p_weights, std::nullopt,
                         params.num_servers() * dist.p_direct}};
    if (verify) {
      const WpirScheme scheme(params, std::move(dist));
      const double leak = maximal_leakage(enumerate_query_law(scheme, 1));
      const double cost = download_cost(scheme).cost;
      if (std::abs(leak - std::min(rho, cap)) > 1e-9 || std::abs(cost - point.download) > 1e-9) {
        std::ostringstream os;
        os.precision(15);
        os << "maximal-leakage point at rho = " << rho << " disagrees with enumeration (leakage "
           << leak << ", download " << cost << ")";
        throw std::logic_error(os.str());
      }
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<TradeoffPoint> maxl_baseline_curve(const SystemParams& params, int grid_size) {
  require_grid(grid_size);
  const int n = params.num_servers();
  const int k = params.num_messages();
  const double lo = 1.0 / static_cast<double>(params.tsc_key_count());
  const double hi = 1.0 / n;
  // Number of TSC keys with nonzero interference: N (N^{K-1} - 1).
  const double interfering = static_cast<double>(params.tsc_key_count()) - n;

  std::vector<TradeoffPoint> points;
  for (int i = 0; i < grid_size; ++i) {
    const double p0 = i == grid_size - 1 ? hi : lo + (hi - lo) * i / (grid_size - 1);
    Eigen::VectorXd p = Eigen::VectorXd::Constant(k, std::max(0.0, 1.0 - n * p0) / interfering);
    p(0) = p0;
    const double rho = analytic_maxl(params, p);
    const double d = n / (n - 1.0) * (1.0 - p0);
    points.push_back({rho, d, {Metric::MaxL, 0.0, std::move(p), std::nullopt, 0.0}});
  }
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.rho < b.rho; });
  return points;
}

}  // namespace wpir
