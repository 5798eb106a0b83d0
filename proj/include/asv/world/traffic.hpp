#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/rng.hpp"
#include "asv/dynamics/types.hpp"
#include "asv/guidance/vfg.hpp"
#include "asv/risk/risk.hpp"
#include "asv/world/waterway.hpp"

namespace asv {

struct TrafficConfig {
  double base_speed = 3.0;
  int max_targets = 10;
  double p_faster = 0.15;
  double faster_lo = 1.3, faster_hi = 1.5;
  double slower_lo = 0.4, slower_hi = 0.8;
  double p_opposing = 0.5;  ///< among slower vessels
  double near_lo = 0.3, near_hi = 0.7;  ///< NM
  double opposing_lo = 1.1, opposing_hi = 1.9;  ///< NM
  double p_non_cooperative = 0.2;
  double own_speed_lo = 0.8, own_speed_hi = 1.2;
  double vfg_gain = 0.001;
  double length_pp = 64.0;
  double beam = 11.6;
};

enum class SpawnKind { FasterBehind, SlowerAhead, Opposing, Scripted };

struct TrafficVessel {
  int id = 1;
  VesselState state;
  double speed = 0.0;
  bool opposing = false;
  bool cooperative = true;
  SpawnKind kind = SpawnKind::Scripted;
  PathTracker tracker;

  const Path& path(const Waterway& w) const { return opposing ? w.reversed : w.global; }
};

/// Kinematic state moving at `speed` along heading `psi`.
inline VesselState kinematic_state(Vec2 p, double psi, double speed) {
  VesselState s;
  s.x_n = p.n;
  s.y_n = p.e;
  s.psi = wrap_2pi(psi);
  s.u = speed;
  return s;
}

/// Places a vessel at arc length `s` of its path with lateral/along offsets (lateral positive to starboard).
inline TrafficVessel place_on_path(const Waterway& w, bool opposing, double s, double speed, double lateral,
                                   double along) {
  TrafficVessel v;
  v.opposing = opposing;
  v.speed = speed;
  const Path& p = opposing ? w.reversed : w.global;
  const double chi = p.course_at(s + along);
  const Vec2 pos = p.point_at(s + along) + lateral * Vec2{-std::sin(chi), std::cos(chi)};
  v.state = kinematic_state(pos, chi, speed);
  v.tracker.k = p.segment_at(s + along);
  return v;
}

/// Random target-ship set around the own ship.
inline std::vector<TrafficVessel> spawn_traffic(std::uint64_t seed, const VesselState& own, const Waterway& w,
                                                const TrafficConfig& c = {}) {
  Rng rng(seed);
  const double s_own = w.global.project(position_of(own)).s;
  const int n = rng.uniform_int(0, c.max_targets);
  std::vector<TrafficVessel> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    SpawnKind kind;
    double speed, s;
    bool opposing = false;
    if (rng.bernoulli(c.p_faster)) {
      kind = SpawnKind::FasterBehind;
      speed = rng.uniform(c.faster_lo, c.faster_hi) * c.base_speed;
      s = s_own - rng.uniform(c.near_lo, c.near_hi) * kNauticalMile;
    } else {
      speed = rng.uniform(c.slower_lo, c.slower_hi) * c.base_speed;
      opposing = rng.bernoulli(c.p_opposing);
      if (opposing) {
        kind = SpawnKind::Opposing;
        const double d = rng.uniform(c.opposing_lo, c.opposing_hi) * kNauticalMile;
        s = w.reversed.project(w.global.point_at(s_own + d)).s;
      } else {
        kind = SpawnKind::SlowerAhead;
        s = s_own + rng.uniform(c.near_lo, c.near_hi) * kNauticalMile;
      }
    }
    const double lateral = rng.uniform(-c.beam, c.beam);
    const double along = rng.uniform(-0.5 * c.length_pp, 0.5 * c.length_pp);
    TrafficVessel v = place_on_path(w, opposing, s, speed, lateral, along);
    v.cooperative = !rng.bernoulli(c.p_non_cooperative);
    v.kind = kind;
    v.id = i + 1;
    out.push_back(v);
  }
  return out;
}

/// What a target ship knows about its closest surrounding ship.
struct NeighborSummary {
  bool present = false;
  double distance = std::numeric_limits<double>::infinity();  ///< d̃
  double speed_self = 0.0;                                     ///< U_0
  double speed_other = 0.0;                                    ///< U_1
  double t_cpa = 0.0;
  double d_cpa = 0.0;
  double alpha = 0.0;     ///< bearing of the controlled ship seen from the neighbour
  bool reversed = false;  ///< σ
};

inline NeighborSummary summarize_neighbor(const VesselState& self, const VesselState& other,
                                          const ShipDomain& domain = {}) {
  NeighborSummary nb;
  nb.present = true;
  nb.distance = (position_of(other) - position_of(self)).norm();
  nb.speed_self = self.speed();
  nb.speed_other = other.speed();
  const CpaResult c = cpa(self, other, domain);
  nb.t_cpa = c.t_cpa;
  nb.d_cpa = c.d_cpa;
  nb.alpha = nb.distance > 0.0 ? relative_bearing(other, position_of(self)) : 0.0;
  nb.reversed = std::abs(wrap_pi(other.psi - self.psi)) >= 0.5 * kPi;
  return nb;
}

/// Closest vessel by midship distance among `others`; absent when the list is empty.
inline NeighborSummary closest_neighbor(const VesselState& self, const std::vector<VesselState>& others,
                                        const ShipDomain& domain = {}) {
  const VesselState* best = nullptr;
  double dmin = std::numeric_limits<double>::infinity();
  for (const VesselState& o : others) {
    const double d = (position_of(o) - position_of(self)).norm();
    if (d < dmin) {
      dmin = d;
      best = &o;
    }
  }
  return best ? summarize_neighbor(self, *best, domain) : NeighborSummary{};
}

enum class TsBranch { OpposingTurn, OvertakeLeft, Default };

struct TsGuidance {
  double chi_d = 0.0;   ///< VFG desired course
  double chi_pk = 0.0;  ///< course of the active segment
  double y_e = 0.0;     ///< cross-track error on the vessel's own path
};

struct TsDecision {
  double heading = 0.0;
  TsBranch branch = TsBranch::Default;
};

/// Rule-based target-ship heading. Non-cooperative vessels always follow the guidance course.
inline TsDecision ts_rule(const TsGuidance& g, const NeighborSummary& nb, double beam, double length_pp,
                          bool cooperative) {
  if (cooperative && nb.present) {
    const double d = nb.distance;
    if (nb.t_cpa > 0.0 && nb.d_cpa < 2.0 * beam && d <= 10.0 * length_pp && nb.reversed) {
      return {g.chi_d + deg2rad(5.0), TsBranch::OpposingTurn};
    } else if (nb.speed_self > nb.speed_other && d <= 10.0 * length_pp && nb.alpha >= deg2rad(135.0) &&
               nb.alpha <= deg2rad(315.0)) {
      if (g.y_e > 0.0) return {g.chi_d - deg2rad(8.0), TsBranch::OvertakeLeft};
      return {g.chi_pk - deg2rad(8.0) * std::exp((g.y_e / (5.0 * beam)) * std::log(4.0)), TsBranch::OvertakeLeft};
    }
  }
  return {g.chi_d, TsBranch::Default};
}

/// Updates the vessel's waypoint index and evaluates the heading rule.
inline TsDecision ts_heading_command(TrafficVessel& v, const Waterway& w, const NeighborSummary& nb,
                                     const TrafficConfig& c = {}) {
  const Path& p = v.path(w);
  const TrackErrors e = v.tracker.update(p, position_of(v.state));
  const TsGuidance g{desired_course(p, e, c.vfg_gain), p.course(e.k), e.y_e};
  return ts_rule(g, nb, c.beam, c.length_pp, v.cooperative);
}

/// Moves a vessel `dt` seconds at constant speed along heading `psi`.
inline void advance_kinematic(VesselState& s, double psi, double speed, double dt) {
  s.psi = wrap_2pi(psi);
  s.u = speed;
  s.v = 0.0;
  s.r = 0.0;
  const Vec2 d = (speed * dt) * heading_vector(s.psi);
  s.x_n += d.n;
  s.y_n += d.e;
}

/// One step of rule-controlled traffic. All headings are decided on the pre-step snapshot, then applied.
inline std::vector<TsDecision> step_traffic(std::vector<TrafficVessel>& ts, const VesselState& own,
                                            const Waterway& w, double dt, const TrafficConfig& c = {}) {
  const ShipDomain domain{c.length_pp, c.beam};
  std::vector<TsDecision> decisions(ts.size());
  std::vector<VesselState> others;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    others.clear();
    others.push_back(own);
    for (std::size_t j = 0; j < ts.size(); ++j)
      if (j != i) others.push_back(ts[j].state);
    const NeighborSummary nb = closest_neighbor(ts[i].state, others, domain);
    decisions[i] = ts_heading_command(ts[i], w, nb, c);
  }
  for (std::size_t i = 0; i < ts.size(); ++i) advance_kinematic(ts[i].state, decisions[i].heading, ts[i].speed, dt);
  return decisions;
}

/// Straight-line extrapolation at current heading and speed.
inline void step_traffic_linear(std::vector<TrafficVessel>& ts, double dt) {
  for (auto& t : ts) advance_kinematic(t.state, t.state.psi, t.speed, dt);
}

}  // namespace asv
