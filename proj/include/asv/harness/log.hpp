#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "asv/core/errors.hpp"

namespace asv {

/// One vessel at one step. Vessel 0 is the own ship; targets use their ids.
struct LogRecord {
  int step = 0;
  double time = 0.0;
  int vessel = 0;
  double x_n = 0.0, y_n = 0.0, psi = 0.0;
  double u = 0.0, v = 0.0, r = 0.0, delta = 0.0;
  double ye_global = 0.0;
  double ye_local = 0.0;
  double chi_e = 0.0;
  double action = 0.0;
  std::map<std::string, double> reward;
  std::vector<double> target_distances;  ///< own-ship records: distance minus own domain radius per target
  std::string event;                     ///< empty, or a marker such as "replan" or "disturbance"

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

/// Append-only trajectory log with a monotone step index and one own-ship record per step.
class TrajectoryLog {
 public:
  void append(LogRecord r) {
    if (!records_.empty() && r.step < records_.back().step)
      throw PreconditionError("log steps must be non-decreasing");
    if (r.vessel == 0) {
      if (own_steps_ > 0 && r.step <= last_own_step_) throw PreconditionError("one own-ship record per step");
      last_own_step_ = r.step;
      ++own_steps_;
    }
    records_.push_back(std::move(r));
  }

  const std::vector<LogRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  std::vector<const LogRecord*> own() const {
    std::vector<const LogRecord*> out;
    for (const auto& r : records_)
      if (r.vessel == 0) out.push_back(&r);
    return out;
  }

  friend bool operator==(const TrajectoryLog& a, const TrajectoryLog& b) { return a.records_ == b.records_; }

 private:
  std::vector<LogRecord> records_;
  int last_own_step_ = 0;
  long long own_steps_ = 0;
};

namespace detail {

inline nlohmann::ordered_json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

inline double number_or_nan(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline std::string to_jsonl(const LogRecord& r) {
  using detail::finite_or_null;
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["time"] = finite_or_null(r.time);
  j["vessel"] = r.vessel;
  j["x_n"] = finite_or_null(r.x_n);
  j["y_n"] = finite_or_null(r.y_n);
  j["psi"] = finite_or_null(r.psi);
  j["u"] = finite_or_null(r.u);
  j["v"] = finite_or_null(r.v);
  j["r"] = finite_or_null(r.r);
  j["delta"] = finite_or_null(r.delta);
  j["ye_global"] = finite_or_null(r.ye_global);
  j["ye_local"] = finite_or_null(r.ye_local);
  j["chi_e"] = finite_or_null(r.chi_e);
  j["action"] = finite_or_null(r.action);
  nlohmann::ordered_json rw = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.reward) rw[k] = finite_or_null(v);
  j["reward"] = rw;
  nlohmann::ordered_json td = nlohmann::ordered_json::array();
  for (double d : r.target_distances) td.push_back(finite_or_null(d));
  j["target_distances"] = td;
  if (!r.event.empty()) j["event"] = r.event;
  return j.dump();
}

inline LogRecord record_from_json(const nlohmann::json& j) {
  using detail::number_or_nan;
  LogRecord r;
  try {
    r.step = j.at("step").get<int>();
    r.time = number_or_nan(j.at("time"));
    r.vessel = j.at("vessel").get<int>();
    r.x_n = number_or_nan(j.at("x_n"));
    r.y_n = number_or_nan(j.at("y_n"));
    r.psi = number_or_nan(j.at("psi"));
    r.u = number_or_nan(j.at("u"));
    r.v = number_or_nan(j.at("v"));
    r.r = number_or_nan(j.at("r"));
    r.delta = number_or_nan(j.at("delta"));
    r.ye_global = number_or_nan(j.at("ye_global"));
    r.ye_local = number_or_nan(j.at("ye_local"));
    r.chi_e = number_or_nan(j.at("chi_e"));
    r.action = number_or_nan(j.at("action"));
    for (const auto& [k, v] : j.at("reward").items()) r.reward[k] = number_or_nan(v);
    for (const auto& d : j.at("target_distances")) r.target_distances.push_back(number_or_nan(d));
    if (j.contains("event")) r.event = j.at("event").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed log record: ") + e.what());
  }
  return r;
}

inline std::string serialize(const TrajectoryLog& log) {
  std::string out;
  for (const auto& r : log.records()) {
    out += to_jsonl(r);
    out += '\n';
  }
  return out;
}

inline TrajectoryLog parse_log(const std::string& text) {
  TrajectoryLog log;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed log line: ") + e.what());
    }
    log.append(record_from_json(j));
  }
  return log;
}

inline void write_log(const std::string& path, const TrajectoryLog& log) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write log: " + path);
  os << serialize(log);
}

inline TrajectoryLog read_log(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open log: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_log(ss.str());
}

/// Flat CSV of the log; reward components and target distances become extra columns.
inline std::string to_csv(const TrajectoryLog& log) {
  std::vector<std::string> reward_keys;
  std::size_t max_targets = 0;
  for (const auto& r : log.records()) {
    for (const auto& [k, v] : r.reward)
      if (std::find(reward_keys.begin(), reward_keys.end(), k) == reward_keys.end()) reward_keys.push_back(k);
    max_targets = std::max(max_targets, r.target_distances.size());
  }
  std::sort(reward_keys.begin(), reward_keys.end());
  std::ostringstream os;
  os.precision(17);
  os << "step,time,vessel,x_n,y_n,psi,u,v,r,delta,ye_global,ye_local,chi_e,action";
  for (const auto& k : reward_keys) os << ",reward_" << k;
  for (std::size_t i = 0; i < max_targets; ++i) os << ",dist_" << i + 1;
  os << ",event\n";
  for (const auto& r : log.records()) {
    os << r.step << ',' << r.time << ',' << r.vessel << ',' << r.x_n << ',' << r.y_n << ',' << r.psi << ',' << r.u << ','
       << r.v << ',' << r.r << ',' << r.delta << ',' << r.ye_global << ',' << r.ye_local << ',' << r.chi_e << ','
       << r.action;
    for (const auto& k : reward_keys) {
      const auto it = r.reward.find(k);
      os << ',';
      if (it != r.reward.end()) os << it->second;
    }
    for (std::size_t i = 0; i < max_targets; ++i) {
      os << ',';
      if (i < r.target_distances.size()) os << r.target_distances[i];
    }
    os << ',' << r.event << '\n';
  }
  return os.str();
}

}  // namespace asv
