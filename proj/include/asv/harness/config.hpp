#pragma once

#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "asv/agents/td3.hpp"
#include "asv/baselines/apf.hpp"
#include "asv/baselines/pid.hpp"
#include "asv/baselines/pso.hpp"
#include "asv/env/lpp.hpp"
#include "asv/env/pf.hpp"
#include "asv/harness/lpp_scenarios.hpp"
#include "asv/harness/pf_scenarios.hpp"
#include "asv/harness/pipeline.hpp"

namespace asv {

struct TrainingConfig {
  long long total_steps = 50000;
  long long eval_every = 5000;
  int eval_episodes = 3;
  long long checkpoint_every = 0;
  bool pf_straight = false;  ///< PF training on the disturbance-free straight path instead of generated waterways
};

struct AisConfig {
  double origin_lat = 53.5;
  double origin_lon = 9.9;
  double dedup_window = 2.0;
};

/// What the `pipeline` command connects.
struct PipelineRunConfig {
  std::string traffic = "scripted";  ///< scripted | ais
  int scenario = 1;                  ///< scripted traffic and waterway from this catalog entry
  std::string ais_dir;
  double ais_t0 = 0.0;
  std::vector<std::vector<double>> path;  ///< global path (north, east) for AIS runs
  double depth = 30.0;
  std::string planner = "apf";    ///< apf | drl
  std::string follower = "pid";   ///< pid | drl
  std::string lpp_weights, pf_weights;
  std::string forcing;  ///< disturbance grid file; empty runs in calm water
};

/// Every tunable constant of a run, with the documented defaults.
struct RunConfig {
  std::string vessel_params;  ///< hydrodynamic parameter file; empty uses the built-in set
  LppConfig lpp;
  PfConfig pf;
  nn::Td3Config td3;
  TrainingConfig training;
  ApfConfig apf;
  PidGains pid;
  PidLimits pid_limits;
  PsoConfig pso = pid_pso_config();
  double pid_penalty = 1e7;
  WaterwayConfig waterway;
  TrafficConfig traffic;
  ScenarioGeometry geometry;
  PfForceLevels pf_levels;
  AisConfig ais;
  PipelineConfig pipeline;
  PipelineRunConfig pipeline_run;
};

namespace detail {

class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError("config section '" + where_ + "' must be an object");
  }

  template <class T>
  JsonReader& operator()(const char* key, T& v) {
    seen_.insert(key);
    if (!j_.contains(key)) return *this;
    try {
      v = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + where_ + "." + key + "': " + e.what());
    }
    return *this;
  }

  JsonReader& deg(const char* key, double& rad) {
    double d = rad2deg(rad);
    (*this)(key, d);
    rad = deg2rad(d);
    return *this;
  }

  template <class F>
  JsonReader& section(const char* key, F&& f) {
    seen_.insert(key);
    if (j_.contains(key)) {
      JsonReader sub(j_.at(key), where_ + "." + key);
      f(sub);
      sub.finish();
    }
    return *this;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + where_ + "." + k + "'");
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

class JsonWriter {
 public:
  explicit JsonWriter(nlohmann::ordered_json& j) : j_(j) { j_ = nlohmann::ordered_json::object(); }

  template <class T>
  JsonWriter& operator()(const char* key, T& v) {
    j_[key] = v;
    return *this;
  }

  JsonWriter& deg(const char* key, double& rad) {
    j_[key] = rad2deg(rad);
    return *this;
  }

  template <class F>
  JsonWriter& section(const char* key, F&& f) {
    JsonWriter sub(j_[key]);
    f(sub);
    return *this;
  }

 private:
  nlohmann::ordered_json& j_;
};

template <class B>
void bind(B& b, LppConfig& c) {
  b("dt", c.dt)("max_steps", c.max_steps)("action_every", c.action_every)("heading_step_deg", c.heading_step_deg);
  b("max_offpath", c.max_offpath)("history", c.history)("regenerate_every", c.regenerate_every)("vfg_gain", c.vfg_gain);
  b("u_scale", c.u_scale)("y_scale", c.y_scale)("d_scale", c.d_scale)("t_norm", c.t_norm)("d_norm", c.d_norm);
  b("k_ye", c.k_ye)("ye_norm", c.ye_norm)("k_chi", c.k_chi)("k_coll", c.k_coll)("k_rule", c.k_rule);
  b("rule_longitudinal", c.rule_longitudinal)("rule_lateral", c.rule_lateral);
  b("w_ye", c.w_ye)("w_chi", c.w_chi)("w_coll", c.w_coll)("w_rule", c.w_rule)("w_comf", c.w_comf);
  b("length_pp", c.length_pp)("beam", c.beam)("draught", c.draught);
}

template <class B>
void bind(B& b, DisturbanceConfig& c) {
  b("current_mean", c.current_mean)("current_max", c.current_max)("wind_max", c.wind_max);
  b("wave_height_mean", c.wave_height_mean)("wave_height_min", c.wave_height_min)("wave_height_max", c.wave_height_max);
  b("wave_length_mean", c.wave_length_mean)("wave_length_min", c.wave_length_min)("wave_length_max", c.wave_length_max);
  b("wave_period_mean", c.wave_period_mean)("wave_period_min", c.wave_period_min)("wave_period_max", c.wave_period_max);
}

template <class B>
void bind(B& b, PfConfig& c) {
  b("dt", c.dt)("max_steps", c.max_steps)("max_offpath", c.max_offpath)("history", c.history);
  b("regenerate_every", c.regenerate_every)("rudder_step_deg", c.rudder_step_deg)("rudder_max_deg", c.rudder_max_deg);
  b("vfg_gain", c.vfg_gain)("nominal_speed", c.nominal_speed);
  b("u_scale", c.u_scale)("v_scale", c.v_scale)("r_scale", c.r_scale)("rdot_scale", c.rdot_scale)("y_scale", c.y_scale);
  b("vc_norm", c.vc_norm)("vwi_norm", c.vwi_norm)("zeta_norm", c.zeta_norm)("period_norm", c.period_norm);
  b("length_norm", c.length_norm)("depth_norm", c.depth_norm)("noise_fraction", c.noise_fraction);
  b("k_ye", c.k_ye)("k_chi", c.k_chi)("k_turn", c.k_turn)("w_ye", c.w_ye)("w_chi", c.w_chi)("w_comf", c.w_comf);
  b("disturbances", c.disturbances);
  b.section("disturbance", [&](auto& s) { bind(s, c.disturbance); });
}

template <class B>
void bind(B& b, nn::Td3Config& c) {
  b("batch", c.batch)("gamma", c.gamma)("lr_actor", c.lr_actor)("lr_critic", c.lr_critic)("capacity", c.capacity);
  b("min_fill", c.min_fill)("policy_delay", c.policy_delay)("tau", c.tau)("target_noise", c.target_noise);
  b("noise_clip", c.noise_clip)("explore_sigma", c.explore_sigma)("history", c.history);
}

template <class B>
void bind(B& b, TrainingConfig& c) {
  b("total_steps", c.total_steps)("eval_every", c.eval_every)("eval_episodes", c.eval_episodes);
  b("checkpoint_every", c.checkpoint_every)("pf_straight", c.pf_straight);
}

template <class B>
void bind(B& b, ApfConfig& c) {
  b.deg("max_turn_deg", c.max_turn);
  b("d_star", c.d_star)("d_l", c.d_l)("k_a1", c.k_a1)("k_a2", c.k_a2)("k_r1", c.k_r1)("k_r2", c.k_r2);
  b("a_lon", c.a_lon)("a_lat", c.a_lat)("d_0", c.d_0)("goal_lookahead", c.goal_lookahead);
}

template <class B>
void bind(B& b, PsoConfig& c) {
  b("particles", c.particles)("iterations", c.iterations)("w_start", c.w_start)("w_end", c.w_end)("c1", c.c1)("c2", c.c2);
  b("init_lo", c.init_lo)("init_hi", c.init_hi)("v_max", c.v_max);
}

template <class B>
void bind(B& b, WaterwayConfig& c) {
  b("straight_base", c.straight_base)("straight_steps", c.straight_steps)("straight_step", c.straight_step);
  b("radius_base", c.radius_base)("radius_steps", c.radius_steps)("angle_base_deg", c.angle_base_deg);
  b("angle_steps", c.angle_steps)("curve_resolution_deg", c.curve_resolution_deg)("target_length", c.target_length);
  b("depth_mean", c.depth_mean)("depth_min", c.depth_min)("depth_max", c.depth_max)("depth_noise", c.depth_noise);
  b("reversed_offset", c.reversed_offset)("half_width", c.half_width)("cell_size", c.cell_size)("start_arc", c.start_arc);
}

template <class B>
void bind(B& b, TrafficConfig& c) {
  b("base_speed", c.base_speed)("max_targets", c.max_targets)("p_faster", c.p_faster);
  b("faster_lo", c.faster_lo)("faster_hi", c.faster_hi)("slower_lo", c.slower_lo)("slower_hi", c.slower_hi);
  b("p_opposing", c.p_opposing)("near_lo", c.near_lo)("near_hi", c.near_hi)("opposing_lo", c.opposing_lo);
  b("opposing_hi", c.opposing_hi)("p_non_cooperative", c.p_non_cooperative)("own_speed_lo", c.own_speed_lo);
  b("own_speed_hi", c.own_speed_hi)("vfg_gain", c.vfg_gain)("length_pp", c.length_pp)("beam", c.beam);
}

template <class B>
void bind(B& b, ScenarioGeometry& c) {
  b("lead_in", c.lead_in)("radius", c.radius)("angle_deg", c.angle_deg)("lead_out", c.lead_out);
  b("straight_length", c.straight_length)("start_arc", c.start_arc)("depth", c.depth)("chord_deg", c.chord_deg);
}

template <class B>
void bind(B& b, PfForceLevels& c) {
  b("current_moderate", c.current_moderate)("current_extreme", c.current_extreme);
  b("wind_moderate", c.wind_moderate)("wind_extreme", c.wind_extreme);
  b("wave_amplitude_moderate", c.wave_amplitude_moderate)("wave_amplitude_extreme", c.wave_amplitude_extreme);
  b("wave_period_moderate", c.wave_period_moderate)("wave_period_extreme", c.wave_period_extreme);
}

template <class B>
void bind(B& b, PipelineConfig& c, PipelineRunConfig& r) {
  b("steps", c.steps)("replan_every", c.replan_every)("near_range", c.near_range)("rollout_steps", c.rollout_steps);
  b("fallback_length", c.fallback_length)("arrival_margin", c.arrival_margin);
  b("traffic", r.traffic)("scenario", r.scenario)("ais_dir", r.ais_dir)("ais_t0", r.ais_t0)("path", r.path);
  b("depth", r.depth)("planner", r.planner)("follower", r.follower)("lpp_weights", r.lpp_weights)("pf_weights", r.pf_weights);
  b("forcing", r.forcing);
}

template <class B>
void bind(B& b, RunConfig& c) {
  b("vessel_params", c.vessel_params);
  b.section("lpp", [&](auto& s) { bind(s, c.lpp); });
  b.section("pf", [&](auto& s) { bind(s, c.pf); });
  b.section("td3", [&](auto& s) { bind(s, c.td3); });
  b.section("training", [&](auto& s) { bind(s, c.training); });
  b.section("apf", [&](auto& s) { bind(s, c.apf); });
  b.section("pid", [&](auto& s) {
    s("kp", c.pid.kp)("ki", c.pid.ki)("kd", c.pid.kd);
    s.deg("rate_limit_deg", c.pid_limits.step)("max_deg", c.pid_limits.max);
    s("off_river_penalty", c.pid_penalty);
  });
  b.section("pso", [&](auto& s) { bind(s, c.pso); });
  b.section("waterway", [&](auto& s) { bind(s, c.waterway); });
  b.section("traffic", [&](auto& s) { bind(s, c.traffic); });
  b.section("scenario_geometry", [&](auto& s) { bind(s, c.geometry); });
  b.section("pf_scenarios", [&](auto& s) { bind(s, c.pf_levels); });
  b.section("ais", [&](auto& s) { s("origin_lat", c.ais.origin_lat)("origin_lon", c.ais.origin_lon)("dedup_window", c.ais.dedup_window); });
  b.section("pipeline", [&](auto& s) { bind(s, c.pipeline, c.pipeline_run); });
}

}  // namespace detail

/// Validates cross-field constraints after loading.
inline void validate(const RunConfig& c) {
  c.apf.validate();
  c.pso.validate();
  if (!c.pid.finite()) throw ConfigError("PID gains must be finite");
  if (c.lpp.dt <= 0.0 || c.pf.dt <= 0.0) throw ConfigError("time steps must be positive");
  if (c.lpp.action_every <= 0) throw ConfigError("lpp.action_every must be positive");
  if (c.training.total_steps < 0 || c.training.eval_episodes < 0) throw ConfigError("training counts must be non-negative");
  if (c.pipeline_run.traffic != "scripted" && c.pipeline_run.traffic != "ais") throw ConfigError("pipeline.traffic must be scripted or ais");
  if (c.pipeline_run.planner != "apf" && c.pipeline_run.planner != "drl") throw ConfigError("pipeline.planner must be apf or drl");
  if (c.pipeline_run.follower != "pid" && c.pipeline_run.follower != "drl") throw ConfigError("pipeline.follower must be pid or drl");
  for (const auto& p : c.pipeline_run.path)
    if (p.size() != 2) throw ConfigError("pipeline.path entries must be [north, east]");
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  detail::JsonReader r(j, "config");
  detail::bind(r, c);
  r.finish();
  validate(c);
  return c;
}

inline nlohmann::ordered_json to_json(RunConfig c) {
  nlohmann::ordered_json j;
  detail::JsonWriter w(j);
  detail::bind(w, c);
  return j;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

inline VesselParams vessel_params_of(const RunConfig& c) {
  return c.vessel_params.empty() ? default_vessel_params() : load_vessel_params(c.vessel_params);
}

}  // namespace asv
