#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/rng.hpp"
#include "asv/dynamics/model.hpp"
#include "asv/dynamics/params.hpp"
#include "asv/guidance/vfg.hpp"
#include "asv/risk/risk.hpp"
#include "asv/world/waterway.hpp"

namespace asv {

struct DisturbanceConfig {
  double current_mean = 0.2, current_max = 0.5;
  double wind_max = 15.0;
  double wave_height_mean = 0.1, wave_height_min = 0.01, wave_height_max = 2.0;
  double wave_length_mean = 20.0, wave_length_min = 1.0, wave_length_max = 100.0;
  double wave_period_mean = 1.0, wave_period_min = 0.5, wave_period_max = 7.0;
};

/// Episode-constant current, wind and wave conditions. Depth is left at its default.
inline EnvDisturbance sample_disturbances(Rng& rng, const DisturbanceConfig& c = {}) {
  EnvDisturbance e;
  e.current_speed = rng.clipped_exponential(c.current_mean, 0.0, c.current_max);
  e.current_angle = rng.uniform(0.0, kTwoPi);
  e.wind_speed = rng.uniform(0.0, c.wind_max);
  e.wind_angle = rng.uniform(0.0, kTwoPi);
  e.wave_amplitude = rng.clipped_exponential(c.wave_height_mean, c.wave_height_min, c.wave_height_max);
  e.wave_length = rng.clipped_exponential(c.wave_length_mean, c.wave_length_min, c.wave_length_max);
  e.wave_period = rng.clipped_exponential(c.wave_period_mean, c.wave_period_min, c.wave_period_max);
  e.wave_angle = rng.uniform(0.0, kTwoPi);
  return e;
}

inline EnvDisturbance sample_disturbances(std::uint64_t seed, const DisturbanceConfig& c = {}) {
  Rng rng(seed);
  return sample_disturbances(rng, c);
}

struct PfConfig {
  double dt = 5.0;
  int max_steps = 500;
  double max_offpath = 400.0;
  int history = 2;
  int regenerate_every = 5;
  double rudder_step_deg = 5.0;
  double rudder_max_deg = 20.0;
  double vfg_gain = 0.01;
  double nominal_speed = 3.0;

  double u_scale = 3.0, v_scale = 0.2, r_scale = 0.002, rdot_scale = 8e-5;
  double y_scale = 64.0;
  double vc_norm = 0.5, vwi_norm = 15.0, zeta_norm = 2.0, period_norm = 7.0, length_norm = 100.0, depth_norm = 100.0;
  double noise_fraction = 0.02;  ///< observation-noise σ as a fraction of each field's scale

  double k_ye = 0.05, k_chi = 5.0, k_turn = -10.0;
  double w_ye = 1.0 / 3.0, w_chi = 1.0 / 3.0, w_comf = 1.0 / 3.0;

  bool disturbances = true;
  DisturbanceConfig disturbance;
};

constexpr int kPfObsDim = 16;
using PfObservation = std::array<double, kPfObsDim>;
/// Observations t−h, …, t (oldest first).
using PfHistory = std::vector<PfObservation>;

struct PfRewardBreakdown {
  double ye = 0.0;
  double chi = 0.0;
  double comf = 0.0;
  double total = 0.0;
};

inline PfRewardBreakdown pf_reward(double y_e, double chi_e, double action, const PfConfig& c = {}) {
  PfRewardBreakdown r;
  const double ce = std::abs(chi_e) <= kPi ? std::abs(chi_e) : std::abs(wrap_pi(chi_e));
  r.ye = std::exp(-c.k_ye * std::abs(y_e));
  r.chi = ce >= 0.5 * kPi ? c.k_turn : std::exp(-c.k_chi * ce);
  r.comf = -action * action;
  r.total = r.ye * c.w_ye + r.chi * c.w_chi + r.comf * c.w_comf;
  return r;
}

/// δ_{t+1} = clip(δ_t + a·step, −max, max).
inline double next_rudder(double delta, double action, const PfConfig& c = {}) {
  const double m = deg2rad(c.rudder_max_deg);
  return std::clamp(delta + std::clamp(action, -1.0, 1.0) * deg2rad(c.rudder_step_deg), -m, m);
}

/// Observation from the ship state, the yaw acceleration estimate, local-path errors and sensed conditions.
inline PfObservation build_pf_observation(const VesselState& s, double r_dot, double y_e, double chi_e,
                                          const EnvDisturbance& env, const PfConfig& c) {
  return {s.u / c.u_scale,
          s.v / c.v_scale,
          s.r / c.r_scale,
          r_dot / c.rdot_scale,
          s.delta / deg2rad(c.rudder_max_deg),
          y_e / c.y_scale,
          wrap_pi(chi_e) / kPi,
          env.current_speed / c.vc_norm,
          wrap_pi(env.current_angle - s.psi) / kPi,
          env.wind_speed / c.vwi_norm,
          wrap_pi(env.wind_angle - s.psi) / kPi,
          wrap_pi(env.wave_angle - s.psi) / kPi,
          env.wave_amplitude / c.zeta_norm,
          env.wave_period / c.period_norm,
          env.wave_length / c.length_norm,
          env.depth / c.depth_norm};
}

/// Conditions as sensed by the own ship: each field perturbed by zero-mean Gaussian noise.
inline EnvDisturbance noisy_reading(const EnvDisturbance& e, Rng& rng, const PfConfig& c) {
  if (!(c.noise_fraction > 0.0)) return e;
  const double f = c.noise_fraction;
  EnvDisturbance n = e;
  n.current_speed += rng.normal(0.0, f * c.vc_norm);
  n.current_angle = wrap_2pi(n.current_angle + rng.normal(0.0, f * kPi));
  n.wind_speed += rng.normal(0.0, f * c.vwi_norm);
  n.wind_angle = wrap_2pi(n.wind_angle + rng.normal(0.0, f * kPi));
  n.wave_angle = wrap_2pi(n.wave_angle + rng.normal(0.0, f * kPi));
  n.wave_amplitude += rng.normal(0.0, f * c.zeta_norm);
  n.wave_period += rng.normal(0.0, f * c.period_norm);
  n.wave_length += rng.normal(0.0, f * c.length_norm);
  n.depth += rng.normal(0.0, f * c.depth_norm);
  return n;
}

/// Per-step disturbance override (step index, own state, sampled conditions) → conditions to apply.
using DisturbanceSchedule = std::function<EnvDisturbance(int, const VesselState&, const EnvDisturbance&)>;

struct PfStepInfo {
  PfRewardBreakdown reward;
  double y_e = 0.0;
  double chi_e = 0.0;
  double delta = 0.0;
  double action = 0.0;  ///< normalised rudder change actually applied
  double depth = 0.0;
  bool truncated = false;
  bool off_path = false;
  bool infeasible = false;
};

struct PfStepResult {
  PfHistory observation;
  double reward = 0.0;
  bool done = false;
  PfStepInfo info;
};

/// Path-following environment on the full vessel dynamics.
class PfEnv {
 public:
  explicit PfEnv(PfConfig cfg = {}, VesselParams params = default_vessel_params(), WaterwayConfig wcfg = {})
      : cfg_(cfg), wcfg_(wcfg), model_(std::move(params)) {
    rpm_ = model_.calibrate_rpm(cfg_.nominal_speed);
  }

  const PfConfig& config() const { return cfg_; }
  const VesselModel& model() const { return model_; }
  double rpm() const { return rpm_; }
  const VesselState& state() const { return state_; }
  const EnvDisturbance& disturbance() const { return base_env_; }
  const Path& path() const { return path_; }
  const Waterway& waterway() const { return *waterway_; }
  int step_count() const { return step_; }
  void set_schedule(DisturbanceSchedule s) { schedule_ = std::move(s); }

  /// Random training episode on a generated waterway, following its global path.
  PfHistory reset(std::uint64_t seed) {
    Rng rng(seed);
    if (!waterway_ || episode_ % cfg_.regenerate_every == 0)
      waterway_ = std::make_shared<const Waterway>(generate_waterway(rng.next_u64(), wcfg_));
    else
      rng.next_u64();
    ++episode_;
    EnvDisturbance env;
    if (cfg_.disturbances) env = sample_disturbances(rng, cfg_.disturbance);
    const double s0 = wcfg_.start_arc;
    VesselState s;
    const Vec2 p = waterway_->global.point_at(s0);
    s.x_n = p.n;
    s.y_n = p.e;
    s.psi = waterway_->global.course_at(s0);
    s.u = cfg_.nominal_speed;
    return start(waterway_->global, s, env, rng.next_u64(), cfg_.max_steps);
  }

  /// Episode along `path` on waterway `w` from state `s` under base conditions `env`.
  PfHistory reset_to(std::shared_ptr<const Waterway> w, const Path& path, const VesselState& s,
                     const EnvDisturbance& env, std::uint64_t noise_seed, int max_steps) {
    waterway_ = std::move(w);
    ++episode_;
    return start(path, s, env, noise_seed, max_steps);
  }

  PfStepResult step(double action) {
    const double a = std::clamp(action, -1.0, 1.0);
    return advance(next_rudder(state_.delta, a, cfg_), a);
  }

  /// Steps with a directly commanded rudder angle, limited like an agent action.
  /// The comfort reward sees the equivalent normalised action.
  PfStepResult step_rudder(double delta) {
    const double step = deg2rad(cfg_.rudder_step_deg), m = deg2rad(cfg_.rudder_max_deg);
    const double d = std::clamp(std::clamp(delta, state_.delta - step, state_.delta + step), -m, m);
    return advance(d, std::clamp((d - state_.delta) / step, -1.0, 1.0));
  }

  PfHistory history() const { return {hist_.begin(), hist_.end()}; }

  /// Switches the followed path mid-episode; the newest observation is rebuilt against it.
  PfHistory set_path(const Path& path) {
    path_ = path;
    tracker_ = {};
    tracker_.k = path_.project(position_of(state_)).k;
    errors_ = tracker_.update(path_, position_of(state_));
    if (!hist_.empty()) hist_.back() = observe();
    return history();
  }

  const TrackErrors& errors() const { return errors_; }

  /// Noise-free course error of the current state with respect to the followed path.
  double course_error_now() const {
    return course_error(desired_course(path_, errors_, cfg_.vfg_gain), state_.course());
  }

  /// Fresh noisy observation of the current state.
  PfObservation observe() {
    return build_pf_observation(state_, r_dot_, errors_.y_e, course_error_now(), noisy_reading(current_env_, noise_, cfg_), cfg_);
  }

  /// Conditions acting on the ship at state `s` (depth from the raster).
  EnvDisturbance conditions(const VesselState& s) const {
    EnvDisturbance e = schedule_ ? schedule_(step_, s, base_env_) : base_env_;
    e.depth = waterway_->depth_at(position_of(s));
    return e;
  }

 private:
  PfStepResult advance(double delta, double a) {
    PfStepResult out;
    PfStepInfo& info = out.info;
    VesselState s = state_;
    s.delta = delta;
    const EnvDisturbance env = conditions(s);
    bool infeasible = false;
    VesselState next = s;
    if (!(env.depth > model_.params().draught)) {
      infeasible = true;
    } else {
      try {
        next = model_.step(s, env, rpm_, cfg_.dt);
      } catch (const GroundingError&) {
        infeasible = true;
      } catch (const InfeasibleDepth&) {
        infeasible = true;
      }
    }
    r_dot_ = (next.r - state_.r) / cfg_.dt;
    state_ = next;
    ++step_;
    current_env_ = conditions(state_);
    errors_ = tracker_.update(path_, position_of(state_));
    const double chi_e = course_error_now();
    info.reward = pf_reward(errors_.y_e, chi_e, a, cfg_);
    info.y_e = errors_.y_e;
    info.chi_e = chi_e;
    info.delta = state_.delta;
    info.action = a;
    info.depth = current_env_.depth;
    info.infeasible = infeasible || !(current_env_.depth > model_.params().draught);
    info.off_path = std::abs(errors_.y_e) > cfg_.max_offpath;
    info.truncated = step_ >= max_steps_;
    out.reward = info.reward.total;
    out.done = info.truncated || info.off_path || info.infeasible;
    push_observation();
    out.observation = history();
    return out;
  }

  PfHistory start(const Path& path, const VesselState& s, const EnvDisturbance& env, std::uint64_t noise_seed,
                  int max_steps) {
    path_ = path;
    state_ = s;
    base_env_ = env;
    noise_ = Rng(noise_seed);
    max_steps_ = max_steps;
    step_ = 0;
    r_dot_ = 0.0;
    tracker_ = {};
    tracker_.k = path_.project(position_of(state_)).k;
    errors_ = tracker_.update(path_, position_of(state_));
    current_env_ = conditions(state_);
    hist_.clear();
    const PfObservation o = observe();
    for (int i = 0; i <= cfg_.history; ++i) hist_.push_back(o);
    return history();
  }

  void push_observation() {
    hist_.push_back(observe());
    while (static_cast<int>(hist_.size()) > cfg_.history + 1) hist_.pop_front();
  }

  PfConfig cfg_;
  WaterwayConfig wcfg_;
  VesselModel model_;
  double rpm_ = 0.0;
  std::shared_ptr<const Waterway> waterway_;
  Path path_;
  VesselState state_;
  EnvDisturbance base_env_, current_env_;
  DisturbanceSchedule schedule_;
  Rng noise_;
  PathTracker tracker_;
  TrackErrors errors_;
  std::deque<PfObservation> hist_;
  double r_dot_ = 0.0;
  int step_ = 0;
  int max_steps_ = 500;
  int episode_ = 0;
};

}  // namespace asv
