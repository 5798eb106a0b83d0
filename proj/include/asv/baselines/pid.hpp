#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <string>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"

namespace asv {

struct PidGains {
  double kp = 1.0;
  double ki = 0.05;
  double kd = 20.0;

  bool finite() const { return std::isfinite(kp) && std::isfinite(ki) && std::isfinite(kd); }
};

struct PidLimits {
  double step = deg2rad(5.0);
  double max = deg2rad(20.0);
};

/// Rudder command: the raw PID value is first limited to ±step around δ_t, then to ±max.
inline double pid_rudder(double chi_e, double integral, double r, double delta, const PidGains& g,
                         const PidLimits& lim = {}) {
  const double raw = g.kp * chi_e + g.ki * integral + g.kd * r;
  return std::clamp(std::clamp(raw, delta - lim.step, delta + lim.step), -lim.max, lim.max);
}

/// Stateful controller; the integral accumulates χ_e from the episode start through the current step.
class PidController {
 public:
  explicit PidController(PidGains g = {}, PidLimits lim = {}) : g_(g), lim_(lim) {
    if (!g_.finite()) throw ConfigError("PID gains must be finite");
  }

  void reset() { integral_ = 0.0; }

  double command(double chi_e, double r, double delta) {
    integral_ += chi_e;
    return pid_rudder(chi_e, integral_, r, delta, g_, lim_);
  }

  double integral() const { return integral_; }
  const PidGains& gains() const { return g_; }
  const PidLimits& limits() const { return lim_; }

 private:
  PidGains g_;
  PidLimits lim_;
  double integral_ = 0.0;
};

inline nlohmann::json to_json(const PidGains& g) { return {{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}}; }

inline PidGains pid_gains_from_json(const nlohmann::json& j) {
  try {
    PidGains g{j.at("kp").get<double>(), j.at("ki").get<double>(), j.at("kd").get<double>()};
    if (!g.finite()) throw ConfigError("PID gains must be finite");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed PID gains: ") + e.what());
  }
}

inline void save_pid_gains(const std::string& path, const PidGains& g, const nlohmann::json& meta = {}) {
  nlohmann::json j = to_json(g);
  if (!meta.is_null()) j["meta"] = meta;
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write PID gains: " + path);
  os << j.dump(2) << '\n';
}

inline PidGains load_pid_gains(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open PID gains: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("unreadable PID gains " + path + ": " + e.what());
  }
  return pid_gains_from_json(j);
}

}  // namespace asv
