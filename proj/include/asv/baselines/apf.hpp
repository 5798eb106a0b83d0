#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"
#include "asv/core/math.hpp"
#include "asv/dynamics/types.hpp"
#include "asv/risk/risk.hpp"

namespace asv {

/// Potential-field planner parameters. Lengths in metres; forces are evaluated with lengths in nautical miles.
struct ApfConfig {
  double max_turn = deg2rad(2.0);
  double d_star = 0.5 * kNauticalMile;
  double d_l = 50.0;
  double k_a1 = 1.0;
  double k_a2 = 0.1;
  double k_r1 = 0.1;
  double k_r2 = 0.1;
  double a_lon = 0.04 * kNauticalMile;
  double a_lat = 0.5 * kNauticalMile;
  double d_0 = 0.5 * kNauticalMile;
  double goal_lookahead = kNauticalMile;

  void validate() const {
    const double v[] = {max_turn, d_star, d_l, k_a1, k_a2, k_r1, k_r2, a_lon, a_lat, d_0, goal_lookahead};
    for (double x : v)
      if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("APF parameters must be positive and finite");
  }
};

struct ApfForces {
  Vec2 att1, att2, rep1, rep2;
  Vec2 total() const { return att1 + att2 + rep1 + rep2; }
};

/// True when `p` lies inside the ellipse centred on `target` whose major axis points along the target heading.
inline bool inside_target_ellipse(const VesselState& target, Vec2 p, const ApfConfig& c) {
  const Vec2 d = p - position_of(target);
  const Vec2 h = heading_vector(target.psi);
  const double along = d.dot(h);
  const double across = h.cross(d);
  const double major = std::max(c.a_lon, c.a_lat), minor = std::min(c.a_lon, c.a_lat);
  return (along * along) / (major * major) + (across * across) / (minor * minor) <= 1.0;
}

/// Conventional repulsion magnitude k_r1·(1/d − 1/d_0)/d², lengths in nautical miles.
inline double apf_rep1_magnitude(double d, const ApfConfig& c) {
  const double dn = d / kNauticalMile, d0 = c.d_0 / kNauticalMile;
  return c.k_r1 * (1.0 / dn - 1.0 / d0) / (dn * dn);
}

/// Force components on the own ship. `origin`–`goal` is the reference line, `y_e` the signed cross-track error.
inline ApfForces apf_forces(const VesselState& own, const std::vector<VesselState>& traffic, Vec2 goal, Vec2 origin,
                            double y_e, const ApfConfig& c) {
  const Vec2 p = position_of(own);
  const Vec2 to_goal = goal - p;
  const double dg = to_goal.norm();
  if (!(dg > 0.0)) throw PreconditionError("APF goal coincides with the own ship");
  ApfForces f;
  f.att1 = (c.k_a1 * std::min(dg, c.d_star) / kNauticalMile / dg) * to_goal;

  if (y_e >= c.d_l) {
    const Vec2 line = goal - origin;
    const double len = line.norm();
    if (len > 0.0) {
      const Vec2 u = (1.0 / len) * line;
      const Vec2 foot = origin + (p - origin).dot(u) * u;
      const Vec2 back = foot - p;
      const double bn = back.norm();
      if (bn > 0.0) f.att2 = (c.k_a2 * std::abs(y_e) / kNauticalMile / bn) * back;
    }
  }

  const ShipDomain domain;
  for (const VesselState& t : traffic) {
    const Vec2 d_ot = position_of(t) - p;
    const double d = d_ot.norm();
    if (!(d > 0.0)) continue;
    if (!inside_target_ellipse(t, p, c) || cpa(own, t, domain).t_cpa < 0.0) continue;
    const Vec2 n_ot = (1.0 / d) * d_ot;
    f.rep1 = f.rep1 + (-apf_rep1_magnitude(d, c)) * n_ot;
    if (std::abs(wrap_pi(t.psi - own.psi)) < 0.5 * kPi) f.rep2 = f.rep2 + c.k_r2 * Vec2{n_ot.e, -n_ot.n};
  }
  return f;
}

/// Heading after one planner step; a vanishing total force holds the heading.
inline double apf_heading(const VesselState& own, const std::vector<VesselState>& traffic, Vec2 goal, Vec2 origin,
                          double y_e, const ApfConfig& c) {
  const Vec2 f = apf_forces(own, traffic, goal, origin, y_e, c).total();
  if (f.n == 0.0 && f.e == 0.0) return own.psi;
  const double psi_d = std::atan2(f.e, f.n);
  return wrap_2pi(own.psi + std::clamp(wrap_pi(psi_d - own.psi), -c.max_turn, c.max_turn));
}

}  // namespace asv
