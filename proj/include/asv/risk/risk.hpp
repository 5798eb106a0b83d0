#pragma once

#include <algorithm>
#include <cmath>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"
#include "asv/core/math.hpp"
#include "asv/dynamics/types.hpp"

namespace asv {

/// Radial ship domain around midship: L_pp ahead of the bow, B beyond the hull to the sides and astern.
/// Anchors are joined by quarter-ellipse arcs.
struct ShipDomain {
  double length_pp = 64.0;
  double beam = 11.6;

  double front() const { return 0.5 * length_pp + length_pp; }
  double side() const { return 0.5 * beam + beam; }
  double aft() const { return 0.5 * length_pp + beam; }

  /// D(α) for a relative bearing α.
  double radius(double alpha) const {
    double a = wrap_2pi(alpha);
    if (a > kPi) a = kTwoPi - a;
    const double along = a <= 0.5 * kPi ? front() : aft();
    const double lat = side();
    const double c = std::cos(a), s = std::sin(a);
    return along * lat / std::sqrt(lat * lat * c * c + along * along * s * s);
  }
};

inline Vec2 position_of(const VesselState& s) { return {s.x_n, s.y_n}; }

/// Velocity over ground in the NED frame.
inline Vec2 ned_velocity(const VesselState& s) {
  const double c = std::cos(s.psi), sn = std::sin(s.psi);
  return {c * s.u - sn * s.v, sn * s.u + c * s.v};
}

/// α = [bearing to point − ψ_observer] in [0, 2π).
inline double relative_bearing(const VesselState& observer, Vec2 point) {
  const Vec2 d = point - position_of(observer);
  if (d.n == 0.0 && d.e == 0.0) throw UndefinedBearing("relative bearing of a coincident point");
  return wrap_2pi(std::atan2(d.e, d.n) - observer.psi);
}

struct CpaResult {
  double t_cpa = 0.0;
  double d_cpa = 0.0;
  double d_cpa_star = 0.0;
  double alpha_cpa = 0.0;
};

inline CpaResult cpa(const VesselState& own, const VesselState& target, const ShipDomain& domain) {
  const Vec2 dp = position_of(target) - position_of(own);
  const Vec2 vo = ned_velocity(own);
  const Vec2 dv = ned_velocity(target) - vo;
  const double dv2 = dv.dot(dv);
  CpaResult r;
  r.t_cpa = dv2 > 1e-24 ? -dp.dot(dv) / dv2 : 0.0;
  const Vec2 rel = dp + r.t_cpa * dv;
  r.d_cpa = rel.norm();
  if (rel.n != 0.0 || rel.e != 0.0) {
    r.alpha_cpa = wrap_2pi(std::atan2(rel.e, rel.n) - own.psi);
  } else if (dp.n != 0.0 || dp.e != 0.0) {
    r.alpha_cpa = wrap_2pi(std::atan2(dp.e, dp.n) - own.psi);
  }
  r.d_cpa_star = std::max(0.0, r.d_cpa - domain.radius(r.alpha_cpa));
  return r;
}

/// Target midship at or inside the own ship's domain.
inline bool is_collision(const VesselState& own, const VesselState& target, const ShipDomain& domain) {
  const Vec2 d = position_of(target) - position_of(own);
  if (d.n == 0.0 && d.e == 0.0) return true;
  return d.norm() <= domain.radius(relative_bearing(own, position_of(target)));
}

}  // namespace asv
