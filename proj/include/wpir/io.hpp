#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "wpir/core.hpp"
#include "wpir/leakage.hpp"
#include "wpir/optimizer.hpp"
#include "wpir/scheme.hpp"
#include "wpir/sim.hpp"

namespace wpir {

using Json = nlohmann::json;

/// {"p_direct": x, "p_weights": [...]}
Json to_json(const PatternDistribution& dist);
/// Validated against `params` (sizes, signs, normalization).
PatternDistribution distribution_from_json(const Json& j, const SystemParams& params);

/// {"N": n, "K": k, "dist": {...}}
Json to_json(const WpirScheme& scheme);
WpirScheme scheme_from_json(const Json& j);

Json to_json(const LeakageReport& report);
Json to_json(const SimReport& report, const SystemParams& params);
Json to_json(const TradeoffPoint& point);
Json to_json(const std::vector<TradeoffPoint>& curve);

/// Header `rho_bits,download_cost,p_direct,p_0,...,p_{K-1}`, 12 significant
/// digits, one row per point in the given order.
void write_curve_csv(std::ostream& out, const std::vector<TradeoffPoint>& curve, int num_messages);

}  // namespace wpir
