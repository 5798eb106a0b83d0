#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "asv/ais/ais.hpp"
#include "asv/env/pf.hpp"
#include "asv/harness/pf_scenarios.hpp"

namespace asv {

/// Current, wind and wave fields exported on a regular north/east grid for a sequence of times.
/// Directions are the directions the current flows, the wind blows and the waves travel toward.
class DisturbanceGrid {
 public:
  struct Slice {
    double time = 0.0;
    std::vector<double> north, east;  ///< strictly increasing axes
    std::vector<EnvDisturbance> cells;  ///< row-major, north index outer
  };

  explicit DisturbanceGrid(std::vector<Slice> slices) : slices_(std::move(slices)) {
    if (slices_.empty()) throw InsufficientData("disturbance grid has no time slices");
    std::sort(slices_.begin(), slices_.end(), [](const Slice& a, const Slice& b) { return a.time < b.time; });
    for (const Slice& s : slices_)
      if (s.north.empty() || s.east.empty() || s.cells.size() != s.north.size() * s.east.size())
        throw FormatError("disturbance grid slice is not a complete rectangle");
  }

  const std::vector<Slice>& slices() const { return slices_; }

  /// Latest slice at or before `t` (the first slice before the grid starts), bilinear in space and clamped
  /// to the grid edge. Speeds and headings blend as vectors.
  EnvDisturbance at(double t, Vec2 p, EnvDisturbance base = {}) const {
    auto it = std::upper_bound(slices_.begin(), slices_.end(), t, [](double x, const Slice& s) { return x < s.time; });
    const Slice& s = it == slices_.begin() ? slices_.front() : *std::prev(it);
    const auto [i0, i1, wn] = bracket(s.north, p.n);
    const auto [j0, j1, we] = bracket(s.east, p.e);
    const std::size_t ne = s.east.size();
    const EnvDisturbance* c[4] = {&s.cells[i0 * ne + j0], &s.cells[i0 * ne + j1], &s.cells[i1 * ne + j0], &s.cells[i1 * ne + j1]};
    const double w[4] = {(1 - wn) * (1 - we), (1 - wn) * we, wn * (1 - we), wn * we};
    const auto blend = [&](auto f) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += w[k] * f(*c[k]);
      return v;
    };
    const auto polar = [&](double& speed, double& angle, auto mag, auto dir) {
      const double x = blend([&](const EnvDisturbance& e) { return mag(e) * std::cos(dir(e)); });
      const double y = blend([&](const EnvDisturbance& e) { return mag(e) * std::sin(dir(e)); });
      speed = std::hypot(x, y);
      angle = speed > 0.0 ? wrap_2pi(std::atan2(y, x)) : blend([&](const EnvDisturbance& e) { return dir(e); });
    };
    polar(base.current_speed, base.current_angle, [](const EnvDisturbance& e) { return e.current_speed; },
          [](const EnvDisturbance& e) { return e.current_angle; });
    polar(base.wind_speed, base.wind_angle, [](const EnvDisturbance& e) { return e.wind_speed; },
          [](const EnvDisturbance& e) { return e.wind_angle; });
    double unused = 0.0;
    polar(unused, base.wave_angle, [](const EnvDisturbance&) { return 1.0; }, [](const EnvDisturbance& e) { return e.wave_angle; });
    base.wave_amplitude = blend([](const EnvDisturbance& e) { return e.wave_amplitude; });
    base.wave_period = blend([](const EnvDisturbance& e) { return e.wave_period; });
    base.wave_length = blend([](const EnvDisturbance& e) { return e.wave_length; });
    return base;
  }

 private:
  struct Bracket {
    std::size_t lo, hi;
    double w;
  };

  static Bracket bracket(const std::vector<double>& axis, double x) {
    if (axis.size() == 1 || x <= axis.front()) return {0, 0, 0.0};
    if (x >= axis.back()) return {axis.size() - 1, axis.size() - 1, 0.0};
    const std::size_t hi = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
    return {hi - 1, hi, (x - axis[hi - 1]) / (axis[hi] - axis[hi - 1])};
  }

  std::vector<Slice> slices_;
};

/// Reads a grid from delimited text with the header columns timestamp, north, east, current_speed,
/// current_dir_deg, wind_speed, wind_dir_deg, wave_amplitude, wave_dir_deg, wave_period and optionally
/// wave_length (deep-water length from the period when absent). Timestamps use the AIS clock.
inline DisturbanceGrid parse_disturbance_grid(std::istream& is, char sep = ',') {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty disturbance grid");
  std::vector<std::string> head = detail::split(line, sep);
  for (auto& h : head) std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < head.size(); ++i) col[head[i]] = i;
  for (const char* k : {"timestamp", "north", "east", "current_speed", "current_dir_deg", "wind_speed", "wind_dir_deg",
                        "wave_amplitude", "wave_dir_deg", "wave_period"})
    if (!col.count(k)) throw FormatError(std::string("disturbance grid header lacks column '") + k + "'");
  const bool has_length = col.count("wave_length") > 0;

  std::map<double, std::map<std::pair<double, double>, EnvDisturbance>> by_time;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split(line, sep);
    if (f.size() != head.size()) throw FormatError("disturbance grid line " + std::to_string(lineno) + " has the wrong field count");
    const auto num = [&](const char* k) {
      const auto v = detail::number(f[col.at(k)]);
      if (!v) throw FormatError("disturbance grid line " + std::to_string(lineno) + ": bad '" + k + "'");
      return *v;
    };
    const auto t = detail::parse_timestamp(f[col.at("timestamp")]);
    if (!t) throw FormatError("disturbance grid line " + std::to_string(lineno) + ": bad timestamp");
    EnvDisturbance e;
    e.current_speed = num("current_speed");
    e.current_angle = wrap_2pi(deg2rad(num("current_dir_deg")));
    e.wind_speed = num("wind_speed");
    e.wind_angle = wrap_2pi(deg2rad(num("wind_dir_deg")));
    e.wave_amplitude = num("wave_amplitude");
    e.wave_angle = wrap_2pi(deg2rad(num("wave_dir_deg")));
    e.wave_period = num("wave_period");
    e.wave_length = has_length ? num("wave_length") : deep_water_wave_length(e.wave_period);
    if (e.current_speed < 0.0 || e.wind_speed < 0.0 || e.wave_amplitude < 0.0 || e.wave_period < 0.0 || e.wave_length < 0.0)
      throw FormatError("disturbance grid line " + std::to_string(lineno) + ": negative magnitude");
    if (!by_time[*t].emplace(std::pair{num("north"), num("east")}, e).second)
      throw FormatError("disturbance grid line " + std::to_string(lineno) + ": duplicate point");
  }

  std::vector<DisturbanceGrid::Slice> slices;
  for (const auto& [t, pts] : by_time) {
    DisturbanceGrid::Slice s;
    s.time = t;
    for (const auto& [ne, e] : pts) {
      if (s.north.empty() || s.north.back() != ne.first) s.north.push_back(ne.first);
      if (std::find(s.east.begin(), s.east.end(), ne.second) == s.east.end()) s.east.push_back(ne.second);
    }
    std::sort(s.east.begin(), s.east.end());
    if (pts.size() != s.north.size() * s.east.size()) throw FormatError("disturbance grid slice is not a complete rectangle");
    for (const auto& [ne, e] : pts) s.cells.push_back(e);
    slices.push_back(std::move(s));
  }
  return DisturbanceGrid(std::move(slices));
}

inline DisturbanceGrid read_disturbance_grid(const std::string& path, char sep = ',') {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open disturbance grid '" + path + "'");
  return parse_disturbance_grid(is, sep);
}

/// Conditions at the ship's position at time t0 + step · dt.
inline DisturbanceSchedule grid_schedule(std::shared_ptr<const DisturbanceGrid> g, double t0, double dt) {
  return [g = std::move(g), t0, dt](int step, const VesselState& s, const EnvDisturbance& base) {
    return g->at(t0 + step * dt, position_of(s), base);
  };
}

}  // namespace asv
