#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "asv/baselines/apf.hpp"
#include "asv/core/angles.hpp"
#include "asv/env/lpp.hpp"
#include "asv/harness/log.hpp"
#include "asv/harness/metrics.hpp"

namespace asv {

enum class Curvature { Straight, Right, Left };
enum class Setup { VesselTrain, OvertakeOvertaker, OvertakeOncoming, OvertakeOvertakerOncoming, BeingOvertaken, StaticObstacles };

inline std::string to_string(Curvature c) {
  switch (c) {
    case Curvature::Straight: return "straight";
    case Curvature::Right: return "right";
    case Curvature::Left: return "left";
  }
  return "?";
}

inline std::string to_string(Setup s) {
  switch (s) {
    case Setup::VesselTrain: return "vessel-train";
    case Setup::OvertakeOvertaker: return "overtake-overtaker";
    case Setup::OvertakeOncoming: return "overtake-oncoming";
    case Setup::OvertakeOvertakerOncoming: return "overtake-overtaker-oncoming";
    case Setup::BeingOvertaken: return "being-overtaken";
    case Setup::StaticObstacles: return "static-obstacles";
  }
  return "?";
}

/// Initial placement of one scripted target relative to the own ship.
struct ScriptedTarget {
  double speed = 0.0;
  double ahead = 0.0;    ///< arc-length offset along the global path (m)
  double lateral = 0.0;  ///< offset to starboard of the vessel's own path (m)
  bool opposing = false;
};

struct ScenarioSpec {
  int id = 1;
  Curvature curvature = Curvature::Straight;
  Setup setup = Setup::VesselTrain;
  std::vector<ScriptedTarget> targets;
  double own_speed = 3.0;
  int steps = 300;
};

/// Initial target speeds per setup, identical for every waterway shape.
inline std::vector<double> setup_speeds(Setup s) {
  switch (s) {
    case Setup::VesselTrain: return {1.50, 1.50, 1.50, 1.50, 1.50};
    case Setup::OvertakeOvertaker: return {1.05, 1.65};
    case Setup::OvertakeOncoming: return {1.20, 2.10, 1.20};
    case Setup::OvertakeOvertakerOncoming: return {1.20, 2.10, 1.20, 1.65};
    case Setup::BeingOvertaken: return {4.50};
    case Setup::StaticObstacles: return {0.0, 0.0, 0.0, 0.0, 0.0};
  }
  return {};
}

inline std::vector<ScriptedTarget> setup_targets(Setup s) {
  const std::vector<double> u = setup_speeds(s);
  switch (s) {
    case Setup::VesselTrain: return {{u[0], 300}, {u[1], 550}, {u[2], 800}, {u[3], 1050}, {u[4], 1300}};
    case Setup::OvertakeOvertaker: return {{u[0], 600}, {u[1], 350}};
    case Setup::OvertakeOncoming: return {{u[0], 400}, {u[1], 2000, 0, true}, {u[2], 900}};
    case Setup::OvertakeOvertakerOncoming: return {{u[0], 700}, {u[1], 2000, 0, true}, {u[2], 2800, 0, true}, {u[3], 400}};
    case Setup::BeingOvertaken: return {{u[0], -400}};
    case Setup::StaticObstacles: return {{u[0], 400, 0}, {u[1], 800, 30}, {u[2], 1200, -30}, {u[3], 1600, 0}, {u[4], 2000, 30}};
  }
  return {};
}

/// Scenarios 1–6 straight, 7–12 right curve, 13–18 left curve; within each block the six setups in order.
inline ScenarioSpec scenario_spec(int id) {
  if (id < 1 || id > 18) throw ConfigError("scenario id must lie in 1..18");
  ScenarioSpec s;
  s.id = id;
  s.curvature = static_cast<Curvature>((id - 1) / 6);
  s.setup = static_cast<Setup>((id - 1) % 6);
  s.targets = setup_targets(s.setup);
  return s;
}

struct ScenarioGeometry {
  double lead_in = 3000.0;
  double radius = 1500.0;
  double angle_deg = 60.0;
  double lead_out = 9000.0;
  double straight_length = 13000.0;
  double start_arc = 2000.0;
  double depth = 30.0;
  double chord_deg = 2.0;
};

/// Global path heading north; curved variants turn after the lead-in.
inline Path scenario_path(Curvature c, const ScenarioGeometry& g = {}) {
  if (c == Curvature::Straight) return Path({{0.0, 0.0}, {g.straight_length, 0.0}});
  const double dir = c == Curvature::Right ? 1.0 : -1.0;
  std::vector<Vec2> wp{{0.0, 0.0}, {g.lead_in, 0.0}};
  const int n = static_cast<int>(std::ceil(g.angle_deg / g.chord_deg));
  const double dtheta = deg2rad(g.angle_deg) / n;
  const double chord = 2.0 * g.radius * std::sin(0.5 * dtheta);
  for (int j = 0; j < n; ++j) wp.push_back(wp.back() + chord * heading_vector(dir * (j + 0.5) * dtheta));
  wp.push_back(wp.back() + g.lead_out * heading_vector(dir * deg2rad(g.angle_deg)));
  return Path(std::move(wp));
}

struct ScenarioWorld {
  std::shared_ptr<const Waterway> waterway;
  KinematicShip own;
  std::vector<TrafficVessel> traffic;
};

inline ScenarioWorld build_scenario(const ScenarioSpec& spec, std::uint64_t seed, const ScenarioGeometry& g = {}) {
  ScenarioWorld w;
  w.waterway = std::make_shared<const Waterway>(make_waterway(scenario_path(spec.curvature, g), g.depth, derive_seed(seed, 1)));
  const Path& gp = w.waterway->global;
  w.own = {kinematic_state(gp.point_at(g.start_arc), gp.course_at(g.start_arc), spec.own_speed), spec.own_speed};
  int id = 1;
  for (const ScriptedTarget& t : spec.targets) {
    double s = g.start_arc + t.ahead;
    if (t.opposing) s = w.waterway->reversed.project(gp.point_at(s)).s;
    TrafficVessel v = place_on_path(*w.waterway, t.opposing, s, t.speed, t.lateral, 0.0);
    v.id = id++;
    v.cooperative = true;
    v.kind = SpawnKind::Scripted;
    w.traffic.push_back(v);
  }
  return w;
}

enum class Planner { Drl, Apf };

inline std::string to_string(Planner p) { return p == Planner::Drl ? "drl" : "apf"; }

struct LppRunResult {
  TrajectoryLog log;
  int steps = 0;
  int collision_steps = 0;
  double ce = 0.0;
  double mcte = 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  double max_heading_change = 0.0;  ///< Δψ used to normalise the controller effort
};

/// Own-ship and target records at the environment's current step.
inline void log_lpp_step(TrajectoryLog& log, const LppEnv& env, int step, double chi_e, double action,
                         const LppRewardBreakdown* rw) {
  const ShipDomain dom = env.config().domain();
  const VesselState& o = env.own().state;
  LogRecord r;
  r.step = step;
  r.time = step * env.config().dt;
  r.x_n = o.x_n;
  r.y_n = o.y_n;
  r.psi = o.psi;
  r.u = env.own().speed;
  r.ye_global = env.global_errors().y_e;
  r.ye_local = r.ye_global;
  r.chi_e = chi_e;
  r.action = action;
  if (rw) r.reward = {{"ye", rw->ye}, {"chi", rw->chi}, {"coll", rw->coll}, {"rule", rw->rule}, {"comf", rw->comf}, {"total", rw->total}};
  for (const auto& t : env.traffic()) {
    const Vec2 d = position_of(t.state) - position_of(o);
    r.target_distances.push_back(d.norm() > 0.0 ? d.norm() - dom.radius(relative_bearing(o, position_of(t.state))) : -dom.front());
  }
  log.append(r);
  for (const auto& t : env.traffic()) {
    LogRecord tr;
    tr.step = step;
    tr.time = r.time;
    tr.vessel = t.id;
    tr.x_n = t.state.x_n;
    tr.y_n = t.state.y_n;
    tr.psi = t.state.psi;
    tr.u = t.speed;
    log.append(tr);
  }
}

/// Environment configuration for a planner: the potential field turns every step by at most its own limit.
inline LppConfig planner_env_config(Planner p, const ApfConfig& apf = {}, LppConfig c = {}) {
  if (p == Planner::Apf) {
    c.action_every = 1;
    c.heading_step_deg = rad2deg(apf.max_turn);
  }
  return c;
}

/// One potential-field step expressed as the normalised heading action of the environment.
inline double apf_action(const LppEnv& env, Vec2 origin, const ApfConfig& apf) {
  const VesselState& o = env.own().state;
  const Path& gp = env.waterway().global;
  const Vec2 goal = gp.point_at(gp.project(position_of(o)).s + apf.goal_lookahead);
  std::vector<VesselState> ts;
  for (const auto& t : env.traffic()) ts.push_back(t.state);
  const double psi = apf_heading(o, ts, goal, origin, env.global_errors().y_e, apf);
  return std::clamp(wrap_pi(psi - o.psi) / apf.max_turn, -1.0, 1.0);
}

/// Runs a scripted scenario. `policy(env, history)` returns the next action of a learned planner; it is unused
/// for the potential-field planner.
template <class Policy>
LppRunResult run_lpp(const ScenarioSpec& spec, Planner planner, std::uint64_t seed, Policy&& policy,
                     const ApfConfig& apf = {}, const ScenarioGeometry& g = {}, const LppConfig& base = {},
                     const TrafficConfig& traffic = {}) {
  LppEnv env(planner_env_config(planner, apf, base), WaterwayConfig{}, traffic);
  ScenarioWorld w = build_scenario(spec, seed, g);
  const Vec2 origin = position_of(w.own.state);
  LppHistory hist = env.reset_to(w.waterway, w.own, std::move(w.traffic), spec.steps);
  LppRunResult res;
  res.max_heading_change = deg2rad(env.config().heading_step_deg);
  const auto chi0 = course_error(desired_course(env.waterway().global, env.global_errors(), env.config().vfg_gain), env.own().state.psi);
  log_lpp_step(res.log, env, 0, chi0, 0.0, nullptr);
  for (int t = 1; t <= spec.steps; ++t) {
    const double a = planner == Planner::Apf ? apf_action(env, origin, apf) : policy(env, hist);
    const LppStepResult r = env.step(a);
    if (r.info.flags.collisions > 0) ++res.collision_steps;
    log_lpp_step(res.log, env, t, r.info.chi_e, r.info.applied_action, &r.info.reward);
    res.steps = t;
    if (r.done) break;
    hist = r.observation;
  }
  const OwnSeries s = own_series(res.log);
  res.ce = ce_lpp(s.psi, res.max_heading_change);
  res.mcte = mcte_lpp(s.ye_global, env.config().length_pp);
  res.min_dist = min_dist(s.distances, env.config().length_pp);
  return res;
}

inline LppRunResult run_lpp_apf(const ScenarioSpec& spec, std::uint64_t seed, const ApfConfig& apf = {}) {
  return run_lpp(spec, Planner::Apf, seed, [](LppEnv&, const LppHistory&) { return 0.0; }, apf);
}

}  // namespace asv
