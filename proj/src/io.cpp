#include "wpir/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "wpir/rng.hpp"
#include "wpir/table.hpp"

namespace wpir {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string format_g12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

Json to_json(const PatternDistribution& dist) {
  return {{"p_direct", dist.p_direct}, {"p_weights", to_vector(dist.p_weights)}};
}

PatternDistribution distribution_from_json(const Json& j, const SystemParams& params) {
  if (!j.is_object() || !j.contains("p_direct") || !j.contains("p_weights")) {
    throw std::invalid_argument("distribution must be an object with p_direct and p_weights");
  }
  if (!j.at("p_direct").is_number() || !j.at("p_weights").is_array()) {
    throw std::invalid_argument("p_direct must be a number and p_weights an array");
  }
  const auto weights = j.at("p_weights").get<std::vector<double>>();
  PatternDistribution dist{j.at("p_direct").get<double>(),
                           Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()))};
  validate(params, dist);
  return dist;
}

Json to_json(const WpirScheme& scheme) {
  return {{"N", scheme.params().num_servers()},
          {"K", scheme.params().num_messages()},
          {"dist", to_json(scheme.distribution())}};
}

WpirScheme scheme_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("N") || !j.contains("K") || !j.contains("dist")) {
    throw std::invalid_argument("scheme must be an object with N, K and dist");
  }
  const SystemParams params(j.at("N").get<int>(), j.at("K").get<int>());
  return WpirScheme(params, distribution_from_json(j.at("dist"), params));
}

Json to_json(const LeakageReport& report) {
  return {{"metric", to_string(report.metric)}, {"value_bits", report.value}, {"per_server", report.per_server}};
}

Json to_json(const SimReport& report, const SystemParams& params) {
  Json freq = Json::array();
  for (const auto& server : report.empirical_query_freq) {
    Json cells = Json::object();
    for (const auto& [q, f] : server) cells[render_query(query_at(params, q))] = f;
    freq.push_back(std::move(cells));
  }
  Json per_message = Json::array();
  for (double d : report.per_message_download) per_message.push_back(finite_or_null(d));
  return {{"trials", report.trials},
          {"seed", report.seed},
          {"message_seed", report.message_seed},
          {"rng", kRngName},
          {"success_rate", report.success_rate},
          {"empirical_download", report.empirical_download},
          {"download_stderr", report.download_stderr},
          {"theoretical_download", report.theoretical_download},
          {"per_message_download", per_message},
          {"per_message_trials", report.per_message_trials},
          {"max_freq_deviation", finite_or_null(report.max_freq_deviation)},
          {"freq_within_bound", report.freq_within_bound},
          {"empirical_query_freq", freq}};
}

Json to_json(const TradeoffPoint& point) {
  const auto& prov = point.provenance;
  Json j = {{"rho_bits", point.rho},
            {"download_cost", point.download},
            {"metric", to_string(prov.metric)},
            {"p_direct", prov.p_direct},
            {"p_weights", to_vector(prov.p_weights)},
            {"sharing_weight", prov.sharing_weight}};
  j["x_last"] = prov.x_last ? Json(*prov.x_last) : Json(nullptr);
  return j;
}

Json to_json(const std::vector<TradeoffPoint>& curve) {
  Json out = Json::array();
  for (const auto& p : curve) out.push_back(to_json(p));
  return out;
}

void write_curve_csv(std::ostream& out, const std::vector<TradeoffPoint>& curve, int num_messages) {
  out << "rho_bits,download_cost,p_direct";
  for (int w = 0; w < num_messages; ++w) out << ",p_" << w;
  out << '\n';
  for (const auto& point : curve) {
    out << format_g12(point.rho) << ',' << format_g12(point.download) << ','
        << format_g12(point.provenance.p_direct);
    for (int w = 0; w < num_messages; ++w) {
      const double p = w < point.provenance.p_weights.size() ? point.provenance.p_weights(w) : 0.0;
      out << ',' << format_g12(p);
    }
    out << '\n';
  }
}

}  // namespace wpir
