#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/env/pf.hpp"
#include "asv/harness/log.hpp"
#include "asv/harness/metrics.hpp"

namespace asv {

enum class ForceKind { Current, Wind, Wave };
enum class Severity { Zero, Moderate, Extreme };

inline std::string to_string(ForceKind f) {
  switch (f) {
    case ForceKind::Current: return "current";
    case ForceKind::Wind: return "wind";
    case ForceKind::Wave: return "wave";
  }
  return "?";
}

inline std::string to_string(Severity s) {
  switch (s) {
    case Severity::Zero: return "zero";
    case Severity::Moderate: return "moderate";
    case Severity::Extreme: return "extreme";
  }
  return "?";
}

inline ForceKind parse_force(const std::string& s) {
  if (s == "current") return ForceKind::Current;
  if (s == "wind") return ForceKind::Wind;
  if (s == "wave") return ForceKind::Wave;
  throw ConfigError("unknown force '" + s + "'");
}

inline Severity parse_severity(const std::string& s) {
  if (s == "zero") return Severity::Zero;
  if (s == "moderate") return Severity::Moderate;
  if (s == "extreme") return Severity::Extreme;
  throw ConfigError("unknown severity '" + s + "'");
}

/// Magnitudes of the scripted force fields.
struct PfForceLevels {
  double current_moderate = 0.2, current_extreme = 0.5;
  double wind_moderate = 7.5, wind_extreme = 15.0;
  double wave_amplitude_moderate = 0.5, wave_amplitude_extreme = 1.5;
  double wave_period_moderate = 3.0, wave_period_extreme = 7.0;
};

struct PfScenario {
  int id = 1;
  ForceKind force = ForceKind::Current;
  Severity severity = Severity::Moderate;
  int steps = 750;
  double path_length = 15000.0;
  double start_arc = 1000.0;
  double depth = 30.0;
  PfForceLevels levels;
};

/// Current, wind and wave fields at moderate severity (1–3), then at extreme severity (4–6).
inline std::vector<PfScenario> pf_validation_suite() {
  std::vector<PfScenario> out;
  int id = 1;
  for (Severity s : {Severity::Moderate, Severity::Extreme})
    for (ForceKind f : {ForceKind::Current, ForceKind::Wind, ForceKind::Wave}) out.push_back({id++, f, s});
  return out;
}

/// Deep-water wave length for a period.
inline double deep_water_wave_length(double period) { return 9.81 * period * period / kTwoPi; }

/// Field of the scenario's force acting toward `direction`.
inline EnvDisturbance force_field(ForceKind f, Severity s, double direction, const PfForceLevels& l = {}) {
  EnvDisturbance e;
  if (s == Severity::Zero) return e;
  const bool ext = s == Severity::Extreme;
  const double dir = wrap_2pi(direction);
  switch (f) {
    case ForceKind::Current:
      e.current_speed = ext ? l.current_extreme : l.current_moderate;
      e.current_angle = dir;
      break;
    case ForceKind::Wind:
      e.wind_speed = ext ? l.wind_extreme : l.wind_moderate;
      e.wind_angle = dir;
      break;
    case ForceKind::Wave:
      e.wave_amplitude = ext ? l.wave_amplitude_extreme : l.wave_amplitude_moderate;
      e.wave_period = ext ? l.wave_period_extreme : l.wave_period_moderate;
      e.wave_length = deep_water_wave_length(e.wave_period);
      e.wave_angle = dir;
      break;
  }
  return e;
}

/// Segment 0: calm, 1: field toward starboard of the path, 2: calm, 3: field toward port.
inline int pf_segment(int step, int steps) { return std::min(3, step * 4 / std::max(1, steps)); }

inline DisturbanceSchedule pf_schedule(const PfScenario& sc, double path_course) {
  return [sc, path_course](int step, const VesselState&, const EnvDisturbance&) {
    switch (pf_segment(step, sc.steps)) {
      case 1: return force_field(sc.force, sc.severity, path_course + 0.5 * kPi, sc.levels);
      case 3: return force_field(sc.force, sc.severity, path_course - 0.5 * kPi, sc.levels);
      default: return EnvDisturbance{};
    }
  };
}

/// Resets `env` onto the scenario's straight path with its force schedule.
inline PfHistory start_pf_scenario(PfEnv& env, const PfScenario& sc, std::uint64_t seed) {
  const Path path({{0.0, 0.0}, {sc.path_length, 0.0}});
  auto w = std::make_shared<const Waterway>(make_waterway(path, sc.depth, derive_seed(seed, 1)));
  env.set_schedule(pf_schedule(sc, path.course(0)));
  VesselState s;
  s.x_n = sc.start_arc;
  s.psi = path.course(0);
  s.u = env.config().nominal_speed;
  return env.reset_to(w, path, s, {}, derive_seed(seed, 2), sc.steps);
}

inline PfConfig pf_scenario_config(PfConfig c = {}) {
  c.disturbances = false;
  return c;
}

struct PfRunResult {
  TrajectoryLog log;
  int steps = 0;
  bool off_river = false;
  bool infeasible = false;
  double sum_chi2 = 0.0;
  double ce = 0.0;
  double mcte = 0.0;
};

inline LogRecord pf_record(const PfEnv& env, int step, double action, const PfStepInfo* info) {
  const VesselState& s = env.state();
  LogRecord r;
  r.step = step;
  r.time = step * env.config().dt;
  r.x_n = s.x_n;
  r.y_n = s.y_n;
  r.psi = s.psi;
  r.u = s.u;
  r.v = s.v;
  r.r = s.r;
  r.delta = s.delta;
  r.ye_local = env.errors().y_e;
  r.ye_global = env.errors().y_e;
  r.chi_e = env.course_error_now();
  r.action = action;
  if (info) r.reward = {{"ye", info->reward.ye}, {"chi", info->reward.chi}, {"comf", info->reward.comf}, {"total", info->reward.total}};
  return r;
}

/// Runs one scenario. `controller(env, history)` performs one environment step and returns its result.
template <class Controller>
PfRunResult run_pf(PfEnv& env, const PfScenario& sc, std::uint64_t seed, Controller&& controller, bool keep_log = true) {
  PfRunResult res;
  PfHistory hist = start_pf_scenario(env, sc, seed);
  std::vector<double> ye{env.errors().y_e}, delta{env.state().delta};
  double chi = env.course_error_now();
  res.sum_chi2 = chi * chi;
  if (keep_log) res.log.append(pf_record(env, 0, 0.0, nullptr));
  int segment = 0;
  for (int t = 1; t <= sc.steps; ++t) {
    const PfStepResult r = controller(env, hist);
    chi = r.info.chi_e;
    res.sum_chi2 += chi * chi;
    ye.push_back(r.info.y_e);
    delta.push_back(r.info.delta);
    res.steps = t;
    if (keep_log) {
      LogRecord rec = pf_record(env, t, r.info.action, &r.info);
      const int seg = pf_segment(t - 1, sc.steps);
      if (seg != segment) rec.event = "disturbance:" + std::to_string(seg);
      segment = seg;
      res.log.append(std::move(rec));
    }
    if (r.info.off_path || r.info.infeasible) {
      res.off_river = true;
      res.infeasible = r.info.infeasible;
    }
    if (r.done) break;
    hist = r.observation;
  }
  res.ce = ce_pf(delta, deg2rad(env.config().rudder_max_deg));
  res.mcte = mcte_pf(ye);
  return res;
}

}  // namespace asv
