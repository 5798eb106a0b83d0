#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/rng.hpp"
#include "asv/guidance/vfg.hpp"
#include "asv/risk/risk.hpp"
#include "asv/world/traffic.hpp"
#include "asv/world/waterway.hpp"

namespace asv {

struct LppConfig {
  double dt = 5.0;
  int max_steps = 150;
  int action_every = 4;
  double heading_step_deg = 10.0;
  double max_offpath = 0.5 * kNauticalMile;
  int history = 2;
  int regenerate_every = 5;

  double vfg_gain = 0.001;
  double u_scale = 3.0;
  double y_scale = 64.0;
  double d_scale = 0.5 * kNauticalMile;
  double t_norm = 300.0;
  double d_norm = 0.25 * kNauticalMile;

  double k_ye = 2.0;
  double ye_norm = 128.0;
  double k_chi = 4.0;
  double k_coll = -10.0;
  double k_rule = -2.0;
  double rule_longitudinal = 0.5 * kNauticalMile;
  double rule_lateral = 0.25 * kNauticalMile;
  double w_ye = 4.0 / 19.0;
  double w_chi = 1.0 / 19.0;
  double w_coll = 6.0 / 19.0;
  double w_rule = 6.0 / 19.0;
  double w_comf = 2.0 / 19.0;

  double length_pp = 64.0;
  double beam = 11.6;
  double draught = 4.16;

  ShipDomain domain() const { return {length_pp, beam}; }
  double e_norm() const { return 3.0 * beam; }
  double n_norm() const { return length_pp; }
};

inline constexpr std::array<double, 10> kLppRayBearingsDeg{0, 20, 45, 90, 135, 180, 225, 270, 315, 340};
constexpr int kLppOwnDim = 4;
constexpr int kLppWaterwayDim = 10;
constexpr int kLppTargetDim = 7;

using LppTargetFeatures = std::array<double, kLppTargetDim>;
inline constexpr LppTargetFeatures kNoRiskShip{1, -1, 1, -1, 1, -1, 1};

/// One time step of the planning observation. `targets` is never empty.
struct LppObservation {
  std::array<double, kLppOwnDim> own{};
  std::array<double, kLppWaterwayDim> waterway{};
  std::vector<LppTargetFeatures> targets{kNoRiskShip};

  friend bool operator==(const LppObservation&, const LppObservation&) = default;
};

/// Observations t−h, …, t (oldest first).
using LppHistory = std::vector<LppObservation>;

/// Own ship during planning: a point moving at constant speed along its heading.
struct KinematicShip {
  VesselState state;
  double speed = 0.0;
};

/// Features of one target relative to the own ship.
inline LppTargetFeatures lpp_target_features(const VesselState& own, double own_speed, const VesselState& ts,
                                             double ts_speed, double chi_pk, const LppConfig& c) {
  const ShipDomain dom = c.domain();
  const Vec2 d = position_of(ts) - position_of(own);
  const double dist = d.norm();
  const double alpha = dist > 0.0 ? relative_bearing(own, position_of(ts)) : 0.0;
  const CpaResult cp = cpa(own, ts, dom);
  return {(dist - dom.radius(alpha)) / c.d_scale,
          wrap_pi(alpha) / kPi,
          wrap_pi(ts.psi - chi_pk) / kPi,
          (ts_speed - own_speed) / c.u_scale,
          std::abs(wrap_pi(ts.psi - own.psi)) >= 0.5 * kPi ? -1.0 : 1.0,
          cp.t_cpa / c.t_norm,
          cp.d_cpa_star / c.d_norm};
}

/// Observation at one time step given the own ship's global-path errors.
inline LppObservation build_lpp_observation(const KinematicShip& own, const TrackErrors& e,
                                            const std::vector<TrafficVessel>& traffic, const Waterway& w,
                                            const LppConfig& c) {
  LppObservation o;
  const double chi_pk = w.global.course(e.k);
  const double chi_d = desired_course(w.global, e, c.vfg_gain);
  o.own = {own.speed / c.u_scale, wrap_pi(own.state.psi - chi_pk) / kPi,
           course_error(chi_d, own.state.psi) / kPi, e.y_e / c.y_scale};
  const Vec2 p = position_of(own.state);
  for (std::size_t i = 0; i < kLppRayBearingsDeg.size(); ++i) {
    const double d = boundary_ray(w, p, own.state.psi, deg2rad(kLppRayBearingsDeg[i]), c.draught);
    o.waterway[i] = 1.0 - d / kRayMax;
  }
  std::vector<std::pair<double, const TrafficVessel*>> near;
  for (const auto& t : traffic) {
    const double d = (position_of(t.state) - p).norm();
    if (d < c.d_scale) near.emplace_back(d, &t);
  }
  std::stable_sort(near.begin(), near.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (!near.empty()) {
    o.targets.clear();
    for (const auto& [d, t] : near) o.targets.push_back(lpp_target_features(own.state, own.speed, t->state, t->speed, chi_pk, c));
  }
  return o;
}

/// Bearing-dependent elliptical proximity penalty.
inline double lpp_proximity(double alpha, double d, double e_norm, double n_norm) {
  const double ds = d * std::sin(alpha), dc = d * std::cos(alpha);
  return std::exp(-(ds * ds) / (e_norm * e_norm)) * std::exp(-(dc * dc) / (n_norm * n_norm));
}

/// Rhombus through (±longitudinal, 0) and (0, ±lateral) in the target frame.
inline double lpp_rule_range(double alpha, double longitudinal, double lateral) {
  return longitudinal * lateral / (lateral * std::abs(std::cos(alpha)) + longitudinal * std::abs(std::sin(alpha)));
}

struct LppFlags {
  bool ground = false;
  bool lane = false;
  int collisions = 0;
};

inline double lpp_collision_reward(const VesselState& own, const std::vector<TrafficVessel>& traffic,
                                   const LppFlags& flags, const LppConfig& c) {
  const ShipDomain dom = c.domain();
  double worst = 0.0;
  bool any = false;
  for (const auto& t : traffic) {
    const Vec2 tp = position_of(t.state);
    const double d = (tp - position_of(own)).norm();
    const double alpha_os_i = d > 0.0 ? relative_bearing(own, tp) : 0.0;
    const double alpha_i_os = d > 0.0 ? relative_bearing(t.state, position_of(own)) : 0.0;
    const double f = lpp_proximity(alpha_i_os, d - dom.radius(alpha_os_i), c.e_norm(), c.n_norm());
    worst = any ? std::max(worst, f) : f;
    any = true;
  }
  const double count = (flags.ground ? 1.0 : 0.0) + (flags.lane ? 1.0 : 0.0) + flags.collisions;
  return c.k_coll * count - worst;
}

/// Number of targets for which a traffic-rule violation holds.
inline int lpp_rule_violations(const VesselState& own, double own_speed, const std::vector<TrafficVessel>& traffic,
                               const LppConfig& c) {
  auto same_direction = [&](const TrafficVessel& t) { return std::abs(wrap_pi(t.state.psi - own.psi)) < 0.5 * kPi; };
  bool sigma_spd = true;
  for (const auto& t : traffic)
    if (same_direction(t) && !(t.speed > own_speed)) sigma_spd = false;
  int n = 0;
  for (const auto& t : traffic) {
    const double d = (position_of(t.state) - position_of(own)).norm();
    if (d == 0.0) continue;
    const double a = relative_bearing(t.state, position_of(own));
    const bool in_range = d <= lpp_rule_range(a, c.rule_longitudinal, c.rule_lateral);
    const bool overtaking_starboard = own_speed > t.speed && a >= 0.5 * kPi && a <= kPi;
    const bool blocking = sigma_spd && a >= 1.5 * kPi && a < kTwoPi;
    if (in_range && same_direction(t) && (overtaking_starboard || blocking)) ++n;
  }
  return n;
}

inline double lpp_rule_reward(const VesselState& own, double own_speed, const std::vector<TrafficVessel>& traffic,
                              const LppConfig& c) {
  return c.k_rule * lpp_rule_violations(own, own_speed, traffic, c);
}

struct LppRewardBreakdown {
  double ye = 0.0;
  double chi = 0.0;
  double coll = 0.0;
  double rule = 0.0;
  double comf = 0.0;
  double total = 0.0;
};

/// Weighted sum of the five components from their raw inputs.
inline LppRewardBreakdown lpp_reward(double y_e, double chi_e, double r_coll, double r_rule, double action,
                                     const LppConfig& c) {
  LppRewardBreakdown r;
  r.ye = std::exp(-c.k_ye * std::abs(y_e) / c.ye_norm);
  r.chi = std::exp(-c.k_chi * std::abs(wrap_pi(chi_e)));
  r.coll = r_coll;
  r.rule = r_rule;
  r.comf = -action * action;
  r.total = r.ye * c.w_ye + r.chi * c.w_chi + r.coll * c.w_coll + r.rule * c.w_rule + r.comf * c.w_comf;
  return r;
}

struct LppStepInfo {
  LppRewardBreakdown reward;
  LppFlags flags;
  double y_e = 0.0;
  double chi_e = 0.0;
  double applied_action = 0.0;
  double min_distance = 0.0;  ///< min over targets of distance minus own domain radius; +inf without traffic
  bool truncated = false;
  bool off_path = false;
};

struct LppStepResult {
  LppHistory observation;
  double reward = 0.0;
  bool done = false;
  LppStepInfo info;
};

enum class TrafficMode { RuleBased, Linear };

/// Local-path-planning environment with a kinematic own ship.
class LppEnv {
 public:
  explicit LppEnv(LppConfig cfg = {}, WaterwayConfig wcfg = {}, TrafficConfig tcfg = {})
      : cfg_(cfg), wcfg_(wcfg), tcfg_(tcfg) {
    tcfg_.length_pp = cfg_.length_pp;
    tcfg_.beam = cfg_.beam;
  }

  const LppConfig& config() const { return cfg_; }
  const Waterway& waterway() const { return *waterway_; }
  std::shared_ptr<const Waterway> waterway_ptr() const { return waterway_; }
  const KinematicShip& own() const { return own_; }
  const std::vector<TrafficVessel>& traffic() const { return traffic_; }
  std::vector<TrafficVessel>& traffic() { return traffic_; }
  int step_count() const { return step_; }
  int episode() const { return episode_; }
  TrafficMode traffic_mode() const { return mode_; }
  void set_traffic_mode(TrafficMode m) { mode_ = m; }
  const TrackErrors& global_errors() const { return errors_; }

  /// Random training episode; the waterway is regenerated every `regenerate_every` episodes.
  LppHistory reset(std::uint64_t seed) {
    Rng rng(seed);
    if (!waterway_ || episode_ % cfg_.regenerate_every == 0)
      waterway_ = std::make_shared<const Waterway>(generate_waterway(rng.next_u64(), wcfg_));
    else
      rng.next_u64();
    ++episode_;
    const double s0 = wcfg_.start_arc;
    const double speed = rng.uniform(tcfg_.own_speed_lo, tcfg_.own_speed_hi) * tcfg_.base_speed;
    KinematicShip own{kinematic_state(waterway_->global.point_at(s0), waterway_->global.course_at(s0), speed), speed};
    auto ts = spawn_traffic(rng.next_u64(), own.state, *waterway_, tcfg_);
    return start(own, std::move(ts), cfg_.max_steps);
  }

  /// Episode on a given waterway with given ships.
  LppHistory reset_to(std::shared_ptr<const Waterway> w, const KinematicShip& own, std::vector<TrafficVessel> traffic,
                      int max_steps) {
    waterway_ = std::move(w);
    ++episode_;
    return start(own, std::move(traffic), max_steps);
  }

  LppStepResult step(double action) {
    LppStepResult out;
    const double a = std::clamp(action, -1.0, 1.0);
    double applied = 0.0;
    if (step_ % cfg_.action_every == 0) {
      applied = a;
      own_.state.psi = wrap_2pi(own_.state.psi + a * deg2rad(cfg_.heading_step_deg));
    }
    if (mode_ == TrafficMode::RuleBased)
      step_traffic(traffic_, own_.state, *waterway_, cfg_.dt, tcfg_);
    else
      step_traffic_linear(traffic_, cfg_.dt);
    advance_kinematic(own_.state, own_.state.psi, own_.speed, cfg_.dt);
    ++step_;
    errors_ = tracker_.update(waterway_->global, position_of(own_.state));

    LppStepInfo& info = out.info;
    info.applied_action = applied;
    info.flags = flags();
    info.y_e = errors_.y_e;
    info.chi_e = course_error(desired_course(waterway_->global, errors_, cfg_.vfg_gain), own_.state.psi);
    info.min_distance = min_domain_distance();
    const double r_coll = lpp_collision_reward(own_.state, traffic_, info.flags, cfg_);
    const double r_rule = lpp_rule_reward(own_.state, own_.speed, traffic_, cfg_);
    info.reward = lpp_reward(info.y_e, info.chi_e, r_coll, r_rule, applied, cfg_);
    info.off_path = std::abs(waterway_->lateral_offset(position_of(own_.state))) > cfg_.max_offpath;
    info.truncated = step_ >= max_steps_;
    out.reward = info.reward.total;
    out.done = info.truncated || info.off_path;
    push_observation();
    out.observation = history();
    return out;
  }

  LppHistory history() const { return {hist_.begin(), hist_.end()}; }
  LppObservation current_observation() const {
    return build_lpp_observation(own_, errors_, traffic_, *waterway_, cfg_);
  }

  LppFlags flags() const {
    LppFlags f;
    const Vec2 p = position_of(own_.state);
    f.ground = waterway_->depth_at(p) < cfg_.draught;
    f.lane = waterway_->beyond_opposing_path(p);
    const ShipDomain dom = cfg_.domain();
    for (const auto& t : traffic_) f.collisions += is_collision(own_.state, t.state, dom) ? 1 : 0;
    return f;
  }

  double min_domain_distance() const {
    const ShipDomain dom = cfg_.domain();
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : traffic_) {
      const Vec2 d = position_of(t.state) - position_of(own_.state);
      const double n = d.norm();
      m = std::min(m, n > 0.0 ? n - dom.radius(relative_bearing(own_.state, position_of(t.state))) : -dom.front());
    }
    return m;
  }

 private:
  LppHistory start(const KinematicShip& own, std::vector<TrafficVessel> traffic, int max_steps) {
    own_ = own;
    traffic_ = std::move(traffic);
    max_steps_ = max_steps;
    step_ = 0;
    tracker_ = {};
    tracker_.k = waterway_->global.project(position_of(own_.state)).k;
    errors_ = tracker_.update(waterway_->global, position_of(own_.state));
    hist_.clear();
    const LppObservation o = current_observation();
    for (int i = 0; i <= cfg_.history; ++i) hist_.push_back(o);
    return history();
  }

  void push_observation() {
    hist_.push_back(current_observation());
    while (static_cast<int>(hist_.size()) > cfg_.history + 1) hist_.pop_front();
  }

  LppConfig cfg_;
  WaterwayConfig wcfg_;
  TrafficConfig tcfg_;
  std::shared_ptr<const Waterway> waterway_;
  KinematicShip own_;
  std::vector<TrafficVessel> traffic_;
  PathTracker tracker_;
  TrackErrors errors_;
  std::deque<LppObservation> hist_;
  int step_ = 0;
  int max_steps_ = 150;
  int episode_ = 0;
  TrafficMode mode_ = TrafficMode::RuleBased;
};

}  // namespace asv
