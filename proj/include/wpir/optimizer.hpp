#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wpir/core.hpp"
#include "wpir/leakage.hpp"

namespace wpir {

/// Stand-in for x_{K-1} = infinity. Past this the (rho, D) point moves by
/// less than 1e-9 in D.
inline constexpr double kXMax = 1e9;
/// Offset of the log-spaced x grid, so that x = 1 is the first grid point.
inline constexpr double kGridOffset = 1e-6;
/// Tolerance below 1 accepted (and clamped) in the x recursion.
inline constexpr double kXSlack = 1e-9;

// ---------------------------------------------------------------------------
// Maximal leakage

/// p'_0 = min(1/N, (2^rho - 1)/(K - 1)); the remaining mass spread uniformly
/// over all N^K TSC keys.
PatternDistribution solve_maxl(const SystemParams& params, double rho);

/// 1 + (1 - N (2^rho - 1)/(K - 1))_+ (1/N + ... + 1/N^{K-1}).
double maxl_download_bound(const SystemParams& params, double rho);

/// Leakage of the pure direct-download scheme, log2(1 + (K-1)/N).
double maxl_leakage_cap(const SystemParams& params);

/// Closed-form maximal leakage of a TSC-only distribution, in bits.
double analytic_maxl(const SystemParams& params, const Eigen::Ref<const Eigen::VectorXd>& p_weights);

// ---------------------------------------------------------------------------
// Mutual information

/// x = (x_1, ..., x_{K-1}) with x_w = p_{w-1}/p_w, filled backwards from
/// x_{K-1} = x_last. Each step is closed form:
///   x_{K-i} = (K exp(r_i) - i) / (K - i),
///   r_i = sum_{j<i} (1-N)^j log(((K-1) x_{K-1} + 1)/K) - sum_{1<=j<i} (1-N)^j log x_{K-i+j}.
/// Throws OutOfRange if x_last is outside [1, kXMax] or a component drops below 1.
Eigen::VectorXd solve_x_recursion(const SystemParams& params, double x_last);

/// TSC-only distribution with p_w = p_0 / (x_1 ... x_w), normalized.
PatternDistribution p_from_x(const SystemParams& params, const Eigen::Ref<const Eigen::VectorXd>& x);

struct KktResidual {
  double stationarity;           // max_w |dL/dp_w|, w in 1:K-1
  double dual_nu;                // y_{K-1} / N
  Eigen::VectorXd dual_lambda;   // all zero
  Eigen::VectorXd y;             // y_w = log((w x_w + K - w)/K)
  Eigen::VectorXd gradient;      // dL/dp_w, w in 1:K-1
};

/// Lagrangian partials of the TSC-only MI problem at p, using the explicit
/// derivative with x_w = p_{w-1}/p_w taken from p itself. Natural log.
KktResidual kkt_residual(const SystemParams& params, const PatternDistribution& dist);

// ---------------------------------------------------------------------------
// Tradeoff curves

struct Provenance {
  Metric metric = Metric::MI;
  double p_direct = 0.0;
  Eigen::VectorXd p_weights;
  std::optional<double> x_last;  // TSC-optimal component, when one is used
  double sharing_weight = 0.0;   // probability of the direct-download extreme scheme
};

struct TradeoffPoint {
  double rho;       // bits
  double download;  // D
  Provenance provenance;
};

TradeoffPoint mi_point(const SystemParams& params, double x_last);

/// (log2(K)/N, 1) for MI, (log2(1 + (K-1)/N), 1) for MaxL.
TradeoffPoint direct_extreme_point(const SystemParams& params, Metric metric);

/// Log-spaced x_last grid on [1, kXMax]; first point exactly 1, last exactly kXMax.
std::vector<double> x_grid(int grid_size);

/// mi_point over x_grid: the optimized code without the direct pattern.
std::vector<TradeoffPoint> mi_sweep(const SystemParams& params, int grid_size);

/// Lower convex hull, sorted by rho, cut at the first point of minimum D so
/// the result is nonincreasing. Equal rho keeps the smaller D.
std::vector<TradeoffPoint> lower_convex_envelope(std::vector<TradeoffPoint> points);

/// Piecewise-linear envelope value at rho; the last D past its right end.
double envelope_download_at(const std::vector<TradeoffPoint>& envelope, double rho);

/// Lower envelope of mi_sweep plus the direct extreme point. Sweep points on
/// the hull are reported as pure schemes; sweep points under the sharing
/// segment are reported as mixtures with the direct scheme at the same rho.
std::vector<TradeoffPoint> mi_curve(const SystemParams& params, int grid_size);

/// The last sweep vertex before the envelope heads to the extreme point.
std::optional<TradeoffPoint> envelope_tangent(const std::vector<TradeoffPoint>& envelope);

/// Continuous tangent point between the swept curve and the extreme point.
TradeoffPoint mi_tangent_point(const SystemParams& params);

/// Cheapest distribution on the MI envelope with leakage at most rho.
PatternDistribution solve_mi(const SystemParams& params, double rho);

/// Closed-form optimal download sampled uniformly on [0, maxl_leakage_cap]. When
/// N^K <= verify_limit every point is re-derived by enumeration and a
/// mismatch throws std::logic_error.
std::vector<TradeoffPoint> maxl_curve(const SystemParams& params, int grid_size,
                                      std::uint64_t verify_limit = 100'000);

/// The p'_0 = 0 family for maximal leakage: p_0 swept from N^-K to 1/N with
/// the remaining mass uniform over nonzero interference weights.
std::vector<TradeoffPoint> maxl_baseline_curve(const SystemParams& params, int grid_size);

}  // namespace wpir
