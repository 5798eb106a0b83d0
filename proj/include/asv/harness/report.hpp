#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "asv/harness/log.hpp"

namespace asv {

/// Outcome of one run: identifiers, metric values and the terminal status.
struct MetricReport {
  std::string kind;        ///< lpp-scenario | pf-scenario | pipeline
  std::string scenario;
  std::string controller;  ///< drl | apf | pid
  std::uint64_t seed = 0;
  int steps = 0;
  std::string status = "ok";  ///< ok | collision | infeasible | off-path | ais-range
  std::map<std::string, double> metrics;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

inline nlohmann::ordered_json to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["scenario"] = r.scenario;
  j["controller"] = r.controller;
  j["seed"] = r.seed;
  j["steps"] = r.steps;
  j["status"] = r.status;
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metrics) m[k] = detail::finite_or_null(v);
  j["metrics"] = m;
  return j;
}

inline MetricReport report_from_json(const nlohmann::json& j) {
  try {
    MetricReport r;
    r.kind = j.at("kind").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.controller = j.at("controller").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.steps = j.at("steps").get<int>();
    r.status = j.at("status").get<std::string>();
    for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = detail::number_or_nan(v);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad metric report: ") + e.what());
  }
}

/// Fixed-width table with one row per report and one column per metric name seen.
inline std::string format_table(const std::vector<MetricReport>& rs) {
  std::vector<std::string> cols;
  for (const auto& r : rs)
    for (const auto& [k, v] : r.metrics)
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %-28s %-6s %6s %-10s", "kind", "scenario", "ctrl", "steps", "status");
  out += buf;
  for (const auto& c : cols) {
    std::snprintf(buf, sizeof buf, " %12s", c.c_str());
    out += buf;
  }
  out += '\n';
  for (const auto& r : rs) {
    std::snprintf(buf, sizeof buf, "%-14s %-28s %-6s %6d %-10s", r.kind.c_str(), r.scenario.c_str(), r.controller.c_str(), r.steps,
                  r.status.c_str());
    out += buf;
    for (const auto& c : cols) {
      const auto it = r.metrics.find(c);
      if (it == r.metrics.end() || !std::isfinite(it->second))
        std::snprintf(buf, sizeof buf, " %12s", "-");
      else
        std::snprintf(buf, sizeof buf, " %12.4f", it->second);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

/// Process exit status for a finished run: 0 success, 2 collision, 3 infeasible dynamics.
inline int exit_code_for(const MetricReport& r) {
  if (r.status == "infeasible") return 3;
  if (r.status == "collision") return 2;
  return 0;
}

}  // namespace asv
