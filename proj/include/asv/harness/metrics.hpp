#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"
#include "asv/harness/log.hpp"

namespace asv {

inline constexpr double kLengthPp = 64.0;
inline constexpr double kBeam = 11.6;
inline constexpr double kRudderMax = 20.0 * kPi / 180.0;

/// Mean absolute heading change per step, normalised by the per-step limit.
inline double ce_lpp(const std::vector<double>& headings, double max_change) {
  if (headings.size() < 2) throw UndefinedMetric("controller effort needs at least two headings");
  double s = 0.0;
  for (std::size_t t = 1; t < headings.size(); ++t) s += std::abs(wrap_pi(headings[t] - headings[t - 1]));
  return s / (max_change * static_cast<double>(headings.size() - 1));
}

inline double mean_abs_scaled(const std::vector<double>& xs, double scale, const char* what) {
  if (xs.empty()) throw UndefinedMetric(std::string(what) + " of an empty trajectory");
  double s = 0.0;
  for (double x : xs) s += std::abs(x);
  return s / (scale * static_cast<double>(xs.size()));
}

/// Mean absolute global cross-track error in units of L_pp.
inline double mcte_lpp(const std::vector<double>& ye, double length_pp = kLengthPp) {
  return mean_abs_scaled(ye, length_pp, "MCTE");
}

/// Mean absolute local cross-track error in units of the beam.
inline double mcte_pf(const std::vector<double>& ye, double beam = kBeam) { return mean_abs_scaled(ye, beam, "MCTE"); }

/// Mean absolute rudder angle relative to its limit.
inline double ce_pf(const std::vector<double>& delta, double delta_max = kRudderMax) {
  return mean_abs_scaled(delta, delta_max, "controller effort");
}

/// Minimum domain-adjusted distance over steps and targets, in units of L_pp.
inline double min_dist(const std::vector<std::vector<double>>& distances, double length_pp = kLengthPp) {
  double m = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& step : distances)
    for (double d : step) {
      m = std::min(m, d);
      any = true;
    }
  if (!any) throw UndefinedMetric("MinDist without any target ship");
  return m / length_pp;
}

struct OwnSeries {
  std::vector<double> psi, ye_global, ye_local, delta;
  std::vector<std::vector<double>> distances;
};

inline OwnSeries own_series(const TrajectoryLog& log) {
  OwnSeries s;
  for (const LogRecord* r : log.own()) {
    s.psi.push_back(r->psi);
    s.ye_global.push_back(r->ye_global);
    s.ye_local.push_back(r->ye_local);
    s.delta.push_back(r->delta);
    s.distances.push_back(r->target_distances);
  }
  return s;
}

}  // namespace asv
