#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"

namespace asv {

/// Periodic piecewise-linear table over an attack angle in [0, 2π).
class AngleCurve {
 public:
  AngleCurve() = default;

  /// Points are (angle in rad, value); sorted on construction, closed periodically.
  explicit AngleCurve(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    for (auto& p : points_) p.first = wrap_2pi(p.first);
    std::sort(points_.begin(), points_.end());
  }

  bool empty() const { return points_.empty(); }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  double operator()(double angle) const {
    if (points_.empty()) return 0.0;
    if (points_.size() == 1) return points_.front().second;
    const double a = wrap_2pi(angle);
    auto hi = std::upper_bound(points_.begin(), points_.end(), a,
                               [](double x, const auto& p) { return x < p.first; });
    const auto& p1 = hi == points_.end() ? points_.front() : *hi;
    const auto& p0 = hi == points_.begin() ? points_.back() : *(hi - 1);
    double span = p1.first - p0.first;
    double off = a - p0.first;
    if (span <= 0.0) span += kTwoPi;
    if (off < 0.0) off += kTwoPi;
    return p0.second + (off / span) * (p1.second - p0.second);
  }

  friend bool operator==(const AngleCurve&, const AngleCurve&) = default;

 private:
  std::vector<std::pair<double, double>> points_;
};

struct ShallowWaterRow {
  double h_over_t = 0.0;
  std::map<std::string, double> multipliers;

  friend bool operator==(const ShallowWaterRow&, const ShallowWaterRow&) = default;
};

/// Multipliers keyed by H/T. Rows are joined linearly and blend into the identity at the deep threshold.
struct ShallowWaterTable {
  double deep_threshold = 5.0;
  std::vector<ShallowWaterRow> rows;  ///< ascending h_over_t, all below deep_threshold

  friend bool operator==(const ShallowWaterTable&, const ShallowWaterTable&) = default;
};

struct VesselParams {
  std::string name;
  double mass = 0.0;             ///< m (kg)
  double added_mass_x = 0.0;     ///< m_xb (kg)
  double added_mass_y = 0.0;     ///< m_yb (kg)
  double x_g = 0.0;              ///< x_G (m)
  double inertia_z = 0.0;        ///< I_zG (kg m²)
  double added_inertia_z = 0.0;  ///< J_z (kg m²)
  double length_pp = 0.0;        ///< L_pp (m)
  double beam = 0.0;             ///< B (m)
  double draught = 0.0;          ///< T (m)
  double rudder_max = 0.0;       ///< δ_max (rad)

  bool wind_enabled = true;
  bool wave_enabled = true;

  std::map<std::string, double> coefficients;
  AngleCurve wind_cx, wind_cy, wind_cn;
  AngleCurve wave_cx, wave_cy, wave_cn;
  ShallowWaterTable shallow_water;

  /// Throws ParameterError or ConfigError when an invariant is violated.
  void validate() const {
    if (!(mass > 0.0)) throw ParameterError("mass must be positive");
    if (!(added_mass_x >= 0.0) || !(added_mass_y >= 0.0)) throw ParameterError("added masses must be non-negative");
    if (!(length_pp > 0.0)) throw ParameterError("L_pp must be positive");
    if (!(beam > 0.0)) throw ParameterError("B must be positive");
    if (!(draught > 0.0)) throw ParameterError("draught must be positive");
    if (!(rudder_max > 0.0)) throw ParameterError("rudder_max must be positive");
    if (coefficients.empty()) throw ConfigError("coefficient table is empty");
    if (wind_enabled && (wind_cx.empty() || wind_cy.empty() || wind_cn.empty()))
      throw ConfigError("wind model enabled but wind curves are empty");
    if (wave_enabled && (wave_cx.empty() || wave_cy.empty() || wave_cn.empty()))
      throw ConfigError("wave model enabled but wave curves are empty");
    double prev = 0.0;
    for (const auto& row : shallow_water.rows) {
      if (!(row.h_over_t > prev)) throw ConfigError("shallow_water rows must have ascending positive h_over_t");
      if (!(row.h_over_t < shallow_water.deep_threshold))
        throw ConfigError("shallow_water row at or above the deep threshold");
      prev = row.h_over_t;
    }
  }

  friend bool operator==(const VesselParams&, const VesselParams&) = default;
};

namespace detail {

inline AngleCurve cosine_curve(double amp, double freq, bool use_sin) {
  std::vector<std::pair<double, double>> pts;
  for (int deg = 0; deg < 360; deg += 10) {
    const double a = deg2rad(deg);
    pts.emplace_back(a, amp * (use_sin ? std::sin(freq * a) : std::cos(freq * a)));
  }
  return AngleCurve(std::move(pts));
}

}  // namespace detail

/// Downscaled (1:5) KVLCC2-like surrogate. Hull, rudder and propeller coefficients follow the
/// structure of the MMG standard method; values are a surrogate, not the published tables.
inline VesselParams default_vessel_params() {
  VesselParams p;
  p.name = "KVLCC2-like surrogate, 1:5";
  p.mass = 2.501e6;
  p.added_mass_x = 187433.0;
  p.added_mass_y = 1.8999e6;
  p.x_g = 2.24;
  p.inertia_z = 6.4026e8;
  p.added_inertia_z = 3.8387e8;
  p.length_pp = 64.0;
  p.beam = 11.6;
  p.draught = 4.16;
  p.rudder_max = deg2rad(20.0);
  p.coefficients = {
      {"rho_water", 1000.0},
      {"X_H.u_abs_u", -2928.6},
      {"X_H.vv", -5324.8},
      {"X_H.vr", 17039.4},
      {"X_H.rr", 5.9979e6},
      {"Y_H.abs_u_v", -41932.8},
      {"Y_H.abs_u_r", 707133.0},
      {"Y_H.v_abs_v", -71307.0},
      {"Y_H.r_abs_r", 9.30e7},
      {"N_H.abs_u_v", -1167196.0},
      {"N_H.abs_u_r", -2.67177e7},
      {"N_H.v_abs_v", -85197.0},
      {"N_H.r_abs_r", -9.68e9},
      {"R.c_N", 6600.0},
      {"R.gamma", 0.395},
      {"R.l_R", -45.44},
      {"R.t_R", 0.387},
      {"R.a_H", 0.312},
      {"R.x_R", -32.0},
      {"R.x_H", -29.7},
      {"P.D", 1.972},
      {"P.w", 0.35},
      {"P.t", 0.22},
      {"P.k0", 0.2931},
      {"P.k1", -0.2753},
      {"P.k2", -0.1385},
      {"WI.rho_air", 1.225},
      {"WI.A_F", 58.0},
      {"WI.A_L", 320.0},
      {"WA.g", 9.81},
  };
  p.wind_cx = detail::cosine_curve(0.6, 1.0, false);
  p.wind_cy = detail::cosine_curve(0.8, 1.0, true);
  p.wind_cn = detail::cosine_curve(-0.1, 2.0, true);
  p.wave_cx = detail::cosine_curve(0.01, 1.0, false);
  p.wave_cy = detail::cosine_curve(0.02, 1.0, true);
  p.wave_cn = detail::cosine_curve(0.002, 2.0, true);
  p.shallow_water.deep_threshold = 5.0;
  p.shallow_water.rows = {
      {1.2, {{"P.w", 1.25}, {"P.t", 1.20}, {"R.gamma", 1.30}, {"m_xb", 1.20}, {"m_yb", 2.00}, {"J_z", 1.50},
             {"Y_H.abs_u_v", 2.00}, {"N_H.abs_u_v", 1.60}, {"N_H.abs_u_r", 1.80}, {"Y_H.abs_u_r", 1.40}}},
      {1.5, {{"P.w", 1.15}, {"P.t", 1.10}, {"R.gamma", 1.20}, {"m_xb", 1.10}, {"m_yb", 1.60}, {"J_z", 1.30},
             {"Y_H.abs_u_v", 1.60}, {"N_H.abs_u_v", 1.35}, {"N_H.abs_u_r", 1.50}, {"Y_H.abs_u_r", 1.25}}},
      {2.0, {{"P.w", 1.08}, {"P.t", 1.05}, {"R.gamma", 1.10}, {"m_xb", 1.05}, {"m_yb", 1.30}, {"J_z", 1.15},
             {"Y_H.abs_u_v", 1.30}, {"N_H.abs_u_v", 1.15}, {"N_H.abs_u_r", 1.25}, {"Y_H.abs_u_r", 1.10}}},
      {3.0, {{"P.w", 1.03}, {"P.t", 1.02}, {"R.gamma", 1.04}, {"m_xb", 1.02}, {"m_yb", 1.10}, {"J_z", 1.05},
             {"Y_H.abs_u_v", 1.10}, {"N_H.abs_u_v", 1.05}, {"N_H.abs_u_r", 1.08}, {"Y_H.abs_u_r", 1.03}}},
  };
  return p;
}

// ---- JSON ------------------------------------------------------------------------------------

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  if (!j.at(key).is_number()) throw ConfigError("key '" + key + "' in " + where + " is not a number");
  return j.at(key).get<double>();
}

inline AngleCurve curve_from_json(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : j.at(key)) {
    if (!row.is_array() || row.size() != 2) throw ConfigError("curve '" + key + "' rows must be [deg, value]");
    pts.emplace_back(deg2rad(row[0].get<double>()), row[1].get<double>());
  }
  return AngleCurve(std::move(pts));
}

inline nlohmann::json curve_to_json(const AngleCurve& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [a, v] : c.points()) arr.push_back({rad2deg(a), v});
  return arr;
}

}  // namespace detail

inline VesselParams vessel_params_from_json(const nlohmann::json& j) {
  VesselParams p;
  p.name = j.value("name", std::string{});
  if (!j.contains("principal")) throw ConfigError("missing key 'principal' in vessel config");
  const auto& pr = j.at("principal");
  p.mass = detail::require_number(pr, "m", "principal");
  p.added_mass_x = detail::require_number(pr, "m_xb", "principal");
  p.added_mass_y = detail::require_number(pr, "m_yb", "principal");
  p.x_g = detail::require_number(pr, "x_G", "principal");
  p.inertia_z = detail::require_number(pr, "I_zG", "principal");
  p.added_inertia_z = detail::require_number(pr, "J_z", "principal");
  p.length_pp = detail::require_number(pr, "L_pp", "principal");
  p.beam = detail::require_number(pr, "B", "principal");
  p.draught = detail::require_number(pr, "T", "principal");
  p.rudder_max = deg2rad(detail::require_number(pr, "delta_max_deg", "principal"));
  if (j.contains("models")) {
    p.wind_enabled = j.at("models").value("wind", true);
    p.wave_enabled = j.at("models").value("wave", true);
  }
  if (!j.contains("coefficients")) throw ConfigError("missing key 'coefficients' in vessel config");
  for (const auto& [k, v] : j.at("coefficients").items()) {
    if (!v.is_number()) throw ConfigError("coefficient '" + k + "' is not a number");
    p.coefficients[k] = v.get<double>();
  }
  if (p.wind_enabled) {
    if (!j.contains("wind_curves")) throw ConfigError("missing key 'wind_curves' in vessel config");
    const auto& w = j.at("wind_curves");
    p.wind_cx = detail::curve_from_json(w, "C_X", "wind_curves");
    p.wind_cy = detail::curve_from_json(w, "C_Y", "wind_curves");
    p.wind_cn = detail::curve_from_json(w, "C_N", "wind_curves");
  }
  if (p.wave_enabled) {
    if (!j.contains("wave_curves")) throw ConfigError("missing key 'wave_curves' in vessel config");
    const auto& w = j.at("wave_curves");
    p.wave_cx = detail::curve_from_json(w, "C_X", "wave_curves");
    p.wave_cy = detail::curve_from_json(w, "C_Y", "wave_curves");
    p.wave_cn = detail::curve_from_json(w, "C_N", "wave_curves");
  }
  if (j.contains("shallow_water")) {
    const auto& sw = j.at("shallow_water");
    p.shallow_water.deep_threshold = sw.value("deep_threshold", 5.0);
    const nlohmann::json table = sw.value("table", nlohmann::json::array());
    for (const auto& row : table) {
      ShallowWaterRow r;
      r.h_over_t = detail::require_number(row, "h_over_t", "shallow_water.table");
      const nlohmann::json mult = row.value("multipliers", nlohmann::json::object());
      for (const auto& [k, v] : mult.items()) r.multipliers[k] = v.get<double>();
      p.shallow_water.rows.push_back(std::move(r));
    }
  }
  p.validate();
  return p;
}

inline nlohmann::json vessel_params_to_json(const VesselParams& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["principal"] = {{"m", p.mass},         {"m_xb", p.added_mass_x},   {"m_yb", p.added_mass_y},
                    {"x_G", p.x_g},        {"I_zG", p.inertia_z},      {"J_z", p.added_inertia_z},
                    {"L_pp", p.length_pp}, {"B", p.beam},              {"T", p.draught},
                    {"delta_max_deg", rad2deg(p.rudder_max)}};
  j["models"] = {{"wind", p.wind_enabled}, {"wave", p.wave_enabled}};
  j["coefficients"] = p.coefficients;
  j["wind_curves"] = {{"C_X", detail::curve_to_json(p.wind_cx)},
                      {"C_Y", detail::curve_to_json(p.wind_cy)},
                      {"C_N", detail::curve_to_json(p.wind_cn)}};
  j["wave_curves"] = {{"C_X", detail::curve_to_json(p.wave_cx)},
                      {"C_Y", detail::curve_to_json(p.wave_cy)},
                      {"C_N", detail::curve_to_json(p.wave_cn)}};
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : p.shallow_water.rows) table.push_back({{"h_over_t", row.h_over_t}, {"multipliers", row.multipliers}});
  j["shallow_water"] = {{"deep_threshold", p.shallow_water.deep_threshold}, {"table", table}};
  return j;
}

inline VesselParams load_vessel_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vessel config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("vessel config '" + path + "': " + e.what());
  }
  return vessel_params_from_json(j);
}

}  // namespace asv
