#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "asv/ais/trajectory.hpp"
#include "asv/env/lpp.hpp"
#include "asv/env/pf.hpp"
#include "asv/harness/log.hpp"
#include "asv/harness/metrics.hpp"

namespace asv {

struct PipelineConfig {
  int steps = 600;
  int replan_every = 6;                     ///< 30 s at the 5 s step
  double near_range = 0.5 * kNauticalMile;  ///< replan only with a target this close
  int rollout_steps = 30;                   ///< planner steps per local path
  double fallback_length = 0.0;             ///< linear local path length; 0 uses the rollout's travel distance
  double arrival_margin = 50.0;             ///< stop this far before the end of the global path
  EnvDisturbance environment;
  DisturbanceSchedule schedule;  ///< position and time dependent conditions; empty keeps `environment`
  LppConfig lpp;
  PfConfig pf;
  TrafficConfig traffic;
  VesselParams vessel = default_vessel_params();
};

/// Target ships at a step, given the own ship's state. May throw OutOfRange when replay data ends.
using TrafficSource = std::function<std::vector<TrafficVessel>(int step, const VesselState& own)>;
using LppActionFn = std::function<double(LppEnv&, const LppHistory&)>;
using PfControlFn = std::function<PfStepResult(PfEnv&, const PfHistory&)>;

/// Rule-based scripted traffic that reacts to the actual own ship.
class ScriptedTraffic {
 public:
  ScriptedTraffic(std::shared_ptr<const Waterway> w, std::vector<TrafficVessel> ts, double dt, TrafficConfig c = {})
      : w_(std::move(w)), ts_(std::move(ts)), dt_(dt), c_(c) {}

  std::vector<TrafficVessel> operator()(int step, const VesselState& own) {
    while (step_ < step) {
      step_traffic(ts_, own, *w_, dt_, c_);
      ++step_;
    }
    return ts_;
  }

 private:
  std::shared_ptr<const Waterway> w_;
  std::vector<TrafficVessel> ts_;
  double dt_;
  TrafficConfig c_;
  int step_ = 0;
};

/// Targets replayed from interpolated AIS tracks; step k maps to time t0 + k·dt.
class AisTraffic {
 public:
  AisTraffic(std::map<std::uint64_t, TrajectorySpline> tracks, double t0, double dt)
      : tracks_(std::make_shared<const std::map<std::uint64_t, TrajectorySpline>>(std::move(tracks))), t0_(t0), dt_(dt) {}

  std::vector<TrafficVessel> operator()(int step, const VesselState&) const {
    std::vector<TrafficVessel> out;
    int id = 1;
    for (const auto& [mmsi, s] : *tracks_) {
      TrafficVessel v;
      v.id = id++;
      v.state = replay_state(s, t0_ + step * dt_);
      v.speed = v.state.u;
      v.cooperative = false;
      out.push_back(v);
    }
    return out;
  }

 private:
  std::shared_ptr<const std::map<std::uint64_t, TrajectorySpline>> tracks_;
  double t0_, dt_;
};

struct LocalPlan {
  Path path;
  bool replanned = false;  ///< false: linear fallback
};

/// Straight local path from the own position toward the global path `length` ahead.
inline Path linear_local_path(const Waterway& w, Vec2 own, double length) {
  const Path& g = w.global;
  const double s = std::min(g.project(own).s + length, g.total_length());
  Vec2 goal = g.point_at(s);
  if ((goal - own).norm() < 1e-6) goal = own + length * heading_vector(g.course_at(s));
  return Path({own, goal});
}

/// Rolls the planner out on a kinematic copy of the own ship with linearly moving targets; the visited
/// positions become the local path's waypoints.
inline Path rollout_local_path(const std::shared_ptr<const Waterway>& w, const VesselState& own,
                               const std::vector<TrafficVessel>& traffic, const LppActionFn& planner,
                               const PipelineConfig& c) {
  LppEnv env(c.lpp, WaterwayConfig{}, c.traffic);
  env.set_traffic_mode(TrafficMode::Linear);
  const double speed = own.speed();
  const KinematicShip ks{kinematic_state(position_of(own), own.psi, speed), speed};
  LppHistory h = env.reset_to(w, ks, traffic, c.rollout_steps);
  std::vector<Vec2> wp{position_of(own)};
  for (int k = 0; k < c.rollout_steps; ++k) {
    const LppStepResult r = env.step(planner(env, h));
    const Vec2 p = position_of(env.own().state);
    if ((p - wp.back()).norm() > 1e-6) wp.push_back(p);
    if (r.done) break;
    h = r.observation;
  }
  if (wp.size() < 2) return linear_local_path(*w, position_of(own), std::max(1.0, c.rollout_steps * c.lpp.dt * speed));
  return Path(std::move(wp));
}

struct PipelineResult {
  TrajectoryLog log;
  int steps = 0;
  int replans = 0;
  int collision_steps = 0;
  bool infeasible = false;
  std::string end_reason = "completed";  ///< completed | arrived | off-path | infeasible | ais-range
  double mcte_global = 0.0;              ///< in L_pp
  double mcte_local = 0.0;               ///< in beams
  double ce = 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, Path>> plans;  ///< local path adopted at each planning step
};

/// Own ship on full dynamics following local paths that the planner regenerates every `replan_every` steps
/// while a target is within `near_range`; otherwise a straight segment back toward the global path.
inline PipelineResult run_two_level(std::shared_ptr<const Waterway> w, const VesselState& start, TrafficSource traffic,
                                    const LppActionFn& planner, const PfControlFn& follower, std::uint64_t seed,
                                    const PipelineConfig& c = {}) {
  if (c.replan_every <= 0 || c.rollout_steps <= 0 || c.steps <= 0) throw ConfigError("pipeline step counts must be positive");
  PipelineResult res;
  const ShipDomain dom = c.lpp.domain();
  PfConfig pfc = c.pf;
  pfc.disturbances = false;
  PfEnv env(pfc, c.vessel);
  env.set_schedule(c.schedule);
  PathTracker global_tracker;
  global_tracker.k = w->global.project(position_of(start)).k;

  const auto plan = [&](const VesselState& own, const std::vector<TrafficVessel>& ts) {
    bool near = false;
    for (const auto& t : ts) near = near || (position_of(t.state) - position_of(own)).norm() <= c.near_range;
    if (near) return LocalPlan{rollout_local_path(w, own, ts, planner, c), true};
    const double len = c.fallback_length > 0.0 ? c.fallback_length : c.rollout_steps * c.lpp.dt * std::max(own.speed(), 0.5);
    return LocalPlan{linear_local_path(*w, position_of(own), len), false};
  };

  const auto record = [&](int step, const std::vector<TrafficVessel>& ts, const PfStepInfo* info, const std::string& event) {
    const VesselState& s = env.state();
    LogRecord r;
    r.step = step;
    r.time = step * pfc.dt;
    r.x_n = s.x_n;
    r.y_n = s.y_n;
    r.psi = s.psi;
    r.u = s.u;
    r.v = s.v;
    r.r = s.r;
    r.delta = s.delta;
    r.ye_global = global_tracker.update(w->global, position_of(s)).y_e;
    r.ye_local = env.errors().y_e;
    r.chi_e = env.course_error_now();
    r.event = event;
    if (info) {
      r.action = info->action;
      r.reward = {{"ye", info->reward.ye}, {"chi", info->reward.chi}, {"comf", info->reward.comf}, {"total", info->reward.total}};
    }
    for (const auto& t : ts) {
      const Vec2 d = position_of(t.state) - position_of(s);
      r.target_distances.push_back(d.norm() > 0.0 ? d.norm() - dom.radius(relative_bearing(s, position_of(t.state))) : -dom.front());
    }
    res.log.append(r);
    for (const auto& t : ts) {
      LogRecord tr;
      tr.step = step;
      tr.time = r.time;
      tr.vessel = t.id;
      tr.x_n = t.state.x_n;
      tr.y_n = t.state.y_n;
      tr.psi = t.state.psi;
      tr.u = t.speed;
      res.log.append(tr);
    }
  };

  std::vector<TrafficVessel> ts = traffic(0, start);
  LocalPlan lp = plan(start, ts);
  res.replans += lp.replanned ? 1 : 0;
  res.plans.emplace_back(0, lp.path);
  PfHistory hist = env.reset_to(w, lp.path, start, c.environment, derive_seed(seed, 2), c.steps);
  record(0, ts, nullptr, lp.replanned ? "replan" : "linear-path");

  for (int t = 1; t <= c.steps; ++t) {
    const PfStepResult r = follower(env, hist);
    const VesselState& own = env.state();
    try {
      ts = traffic(t, own);
    } catch (const OutOfRange&) {
      res.end_reason = "ais-range";
      break;
    }
    res.steps = t;
    for (const auto& v : ts)
      if (is_collision(own, v.state, dom)) {
        ++res.collision_steps;
        break;
      }
    std::string event;
    hist = r.observation;
    if (t % c.replan_every == 0 && !r.done) {
      lp = plan(own, ts);
      res.replans += lp.replanned ? 1 : 0;
      res.plans.emplace_back(t, lp.path);
      hist = env.set_path(lp.path);
      event = lp.replanned ? "replan" : "linear-path";
    }
    record(t, ts, &r.info, event);
    if (r.info.infeasible) {
      res.infeasible = true;
      res.end_reason = "infeasible";
      break;
    }
    if (r.info.off_path) {
      res.end_reason = "off-path";
      break;
    }
    if (w->global.project(position_of(own)).s >= w->global.total_length() - c.arrival_margin) {
      res.end_reason = "arrived";
      break;
    }
    if (r.done) break;
  }

  const OwnSeries s = own_series(res.log);
  res.mcte_global = mcte_lpp(s.ye_global, c.lpp.length_pp);
  res.mcte_local = mcte_pf(s.ye_local, c.lpp.beam);
  res.ce = ce_pf(s.delta, deg2rad(pfc.rudder_max_deg));
  bool any = false;
  for (const auto& d : s.distances) any = any || !d.empty();
  if (any) res.min_dist = min_dist(s.distances, c.lpp.length_pp);
  return res;
}

}  // namespace asv
