#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"
#include "asv/dynamics/params.hpp"
#include "asv/dynamics/types.hpp"

namespace asv {

/// Coefficients looked up once from the opaque table so the force loop is map-free.
struct ResolvedParams {
  double mass = 0.0, added_mass_x = 0.0, added_mass_y = 0.0, x_g = 0.0, inertia_z = 0.0, added_inertia_z = 0.0;
  double length_pp = 0.0, draught = 0.0;
  double rho_water = 0.0;

  struct Hull {
    double x_u_abs_u, x_vv, x_vr, x_rr;
    double y_abs_u_v, y_abs_u_r, y_v_abs_v, y_r_abs_r;
    double n_abs_u_v, n_abs_u_r, n_v_abs_v, n_r_abs_r;
  } hull{};
  struct Rudder {
    double c_n, gamma, l_r, t_r, a_h, x_r, x_h;
  } rudder{};
  struct Propeller {
    double diameter, wake, thrust_deduction, k0, k1, k2;
  } propeller{};

  bool wind_enabled = false;
  double rho_air = 0.0, area_front = 0.0, area_lateral = 0.0;
  bool wave_enabled = false;
  double gravity = 0.0;
  const VesselParams* source = nullptr;  ///< curves are read from here
};

inline ResolvedParams resolve(const VesselParams& p) {
  auto get = [&](const char* key) {
    auto it = p.coefficients.find(key);
    if (it == p.coefficients.end()) throw ConfigError(std::string("missing coefficient key '") + key + "'");
    return it->second;
  };
  ResolvedParams r;
  r.mass = p.mass;
  r.added_mass_x = p.added_mass_x;
  r.added_mass_y = p.added_mass_y;
  r.x_g = p.x_g;
  r.inertia_z = p.inertia_z;
  r.added_inertia_z = p.added_inertia_z;
  r.length_pp = p.length_pp;
  r.draught = p.draught;
  r.rho_water = get("rho_water");
  r.hull = {get("X_H.u_abs_u"), get("X_H.vv"),      get("X_H.vr"),      get("X_H.rr"),
            get("Y_H.abs_u_v"), get("Y_H.abs_u_r"), get("Y_H.v_abs_v"), get("Y_H.r_abs_r"),
            get("N_H.abs_u_v"), get("N_H.abs_u_r"), get("N_H.v_abs_v"), get("N_H.r_abs_r")};
  r.rudder = {get("R.c_N"), get("R.gamma"), get("R.l_R"), get("R.t_R"), get("R.a_H"), get("R.x_R"), get("R.x_H")};
  r.propeller = {get("P.D"), get("P.w"), get("P.t"), get("P.k0"), get("P.k1"), get("P.k2")};
  r.wind_enabled = p.wind_enabled;
  if (p.wind_enabled) {
    r.rho_air = get("WI.rho_air");
    r.area_front = get("WI.A_F");
    r.area_lateral = get("WI.A_L");
  }
  r.wave_enabled = p.wave_enabled;
  if (p.wave_enabled) r.gravity = get("WA.g");
  r.source = &p;
  return r;
}

/// Velocity of the vessel relative to the water, in the body frame.
inline std::pair<double, double> apply_current(const VesselState& s, const EnvDisturbance& env) {
  const double rel = env.current_angle - s.psi;
  const double u_c = env.current_speed * std::cos(rel);
  const double v_c = env.current_speed * std::sin(rel);
  return {s.u - u_c, s.v - v_c};
}

/// Minimum inflow speed used to keep the rudder drift angle bounded near standstill.
inline constexpr double kMinRudderInflow = 0.1;

inline ForceSet compute_forces(const VesselState& s, const ResolvedParams& p, const EnvDisturbance& env,
                               double propeller_rpm) {
  ForceSet f;
  const auto [ur, vr] = apply_current(s, env);
  const double r = s.r;
  const double abs_u = std::abs(ur);

  const auto& h = p.hull;
  f.hull.x = h.x_u_abs_u * ur * abs_u + h.x_vv * vr * vr + h.x_vr * vr * r + h.x_rr * r * r;
  f.hull.y = h.y_abs_u_v * abs_u * vr + h.y_abs_u_r * abs_u * r + h.y_v_abs_v * vr * std::abs(vr) +
             h.y_r_abs_r * r * std::abs(r);
  f.hull.n = h.n_abs_u_v * abs_u * vr + h.n_abs_u_r * abs_u * r + h.n_v_abs_v * vr * std::abs(vr) +
             h.n_r_abs_r * r * std::abs(r);

  const auto& rd = p.rudder;
  const double alpha_r = s.delta + rd.gamma * (vr + rd.l_r * r) / std::max(abs_u, kMinRudderInflow);
  const double f_n = rd.c_n * ur * abs_u * alpha_r;
  const double cos_d = std::cos(s.delta);
  f.rudder.x = -(1.0 - rd.t_r) * f_n * std::sin(s.delta);
  f.rudder.y = -(1.0 + rd.a_h) * f_n * cos_d;
  f.rudder.n = -(rd.x_r + rd.a_h * rd.x_h) * f_n * cos_d;

  const double n_rps = propeller_rpm / 60.0;
  if (n_rps > 0.0) {
    const auto& pp = p.propeller;
    const double j = (1.0 - pp.wake) * ur / (n_rps * pp.diameter);
    const double kt = pp.k0 + pp.k1 * j + pp.k2 * j * j;
    const double d2 = pp.diameter * pp.diameter;
    f.propeller.x = (1.0 - pp.thrust_deduction) * p.rho_water * n_rps * n_rps * d2 * d2 * kt;
  }

  if (p.wind_enabled) {
    const double rel = env.wind_angle - s.psi;
    const double ua = env.wind_speed * std::cos(rel) - s.u;
    const double va = env.wind_speed * std::sin(rel) - s.v;
    const double q = 0.5 * p.rho_air * (ua * ua + va * va);
    const double gamma = wrap_2pi(std::atan2(va, ua));
    const VesselParams& src = *p.source;
    f.wind.x = q * p.area_front * src.wind_cx(gamma);
    f.wind.y = q * p.area_lateral * src.wind_cy(gamma);
    f.wind.n = q * p.area_lateral * p.length_pp * src.wind_cn(gamma);
  }

  if (p.wave_enabled && env.wave_amplitude > 0.0) {
    const double chi = wrap_2pi(env.wave_angle - s.psi);
    const double q = p.rho_water * p.gravity * env.wave_amplitude * env.wave_amplitude * p.length_pp;
    const VesselParams& src = *p.source;
    f.wave.x = q * src.wave_cx(chi);
    f.wave.y = q * src.wave_cy(chi);
    f.wave.n = q * p.length_pp * src.wave_cn(chi);
  }

  f.sum();
  if (!std::isfinite(f.x) || !std::isfinite(f.y) || !std::isfinite(f.n))
    throw NumericFault("non-finite force component");
  return f;
}

inline ForceSet compute_forces(const VesselState& s, const VesselParams& p, const EnvDisturbance& env,
                               double propeller_rpm) {
  return compute_forces(s, resolve(p), env, propeller_rpm);
}

/// Solves the coupled surge/sway/yaw equations for the accelerations.
template <class Params>
Accelerations accelerations(const VesselState& s, const Params& p, const ForceSet& f) {
  const double m = p.mass;
  const double mx = m + p.added_mass_x;
  const double my = m + p.added_mass_y;
  const double xgm = p.x_g * m;
  const double iz = p.inertia_z + p.x_g * p.x_g * m + p.added_inertia_z;
  const double det = my * iz - xgm * xgm;
  if (!(mx > 0.0) || !(std::abs(det) > 1e-12 * my * iz)) throw ParameterError("singular mass matrix");

  Accelerations a;
  a.u_dot = (f.x + my * s.v * s.r + xgm * s.r * s.r) / mx;
  const double rhs_y = f.y - mx * s.u * s.r;
  const double rhs_n = f.n - xgm * s.u * s.r;
  a.v_dot = (iz * rhs_y - xgm * rhs_n) / det;
  a.r_dot = (my * rhs_n - xgm * rhs_y) / det;
  return a;
}

/// Ballistic update: Euler on velocities, trapezoidal on heading and NED position.
inline VesselState ballistic_update(const VesselState& s, const Accelerations& a, double dt) {
  VesselState n = s;
  n.u = s.u + a.u_dot * dt;
  n.v = s.v + a.v_dot * dt;
  n.r = s.r + a.r_dot * dt;
  const double psi_new = s.psi + 0.5 * dt * (s.r + n.r);
  const double c0 = std::cos(s.psi), s0 = std::sin(s.psi);
  const double c1 = std::cos(psi_new), s1 = std::sin(psi_new);
  n.x_n = s.x_n + 0.5 * dt * ((c0 * s.u - s0 * s.v) + (c1 * n.u - s1 * n.v));
  n.y_n = s.y_n + 0.5 * dt * ((s0 * s.u + c0 * s.v) + (s1 * n.u + c1 * n.v));
  n.psi = wrap_2pi(psi_new);
  return n;
}

namespace detail {

inline double shallow_multiplier(const ShallowWaterTable& table, double ht, const std::string& key) {
  const auto& rows = table.rows;
  auto value = [&](std::size_t i) {
    auto it = rows[i].multipliers.find(key);
    return it == rows[i].multipliers.end() ? 1.0 : it->second;
  };
  if (ht <= rows.front().h_over_t) return value(0);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (ht >= rows[i].h_over_t && ht < rows[i + 1].h_over_t) {
      const double w = (ht - rows[i].h_over_t) / (rows[i + 1].h_over_t - rows[i].h_over_t);
      return value(i) + w * (value(i + 1) - value(i));
    }
  }
  const std::size_t last = rows.size() - 1;
  const double w = (ht - rows[last].h_over_t) / (table.deep_threshold - rows[last].h_over_t);
  return value(last) + w * (1.0 - value(last));
}

}  // namespace detail

/// Applies the shallow-water multiplier table for water depth h and draught t.
inline VesselParams shallow_water_correct(const VesselParams& p, double h, double t) {
  if (!(h > t)) throw InfeasibleDepth("water depth " + std::to_string(h) + " m not above draught " + std::to_string(t) + " m");
  const double ht = h / t;
  if (ht >= p.shallow_water.deep_threshold || p.shallow_water.rows.empty()) return p;

  VesselParams out = p;
  std::map<std::string, bool> keys;
  for (const auto& row : p.shallow_water.rows)
    for (const auto& [k, v] : row.multipliers) keys[k] = true;
  for (const auto& [key, unused] : keys) {
    const double m = detail::shallow_multiplier(p.shallow_water, ht, key);
    if (key == "m_xb") out.added_mass_x = p.added_mass_x * m;
    else if (key == "m_yb") out.added_mass_y = p.added_mass_y * m;
    else if (key == "J_z") out.added_inertia_z = p.added_inertia_z * m;
    else {
      auto it = out.coefficients.find(key);
      if (it == out.coefficients.end()) throw ConfigError("shallow-water multiplier for unknown key '" + key + "'");
      it->second *= m;
    }
  }
  return out;
}

inline VesselState step(const VesselState& s, const VesselParams& p, const EnvDisturbance& env, double propeller_rpm,
                        double dt = 5.0) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  if (!(env.depth > p.draught)) throw GroundingError("water depth below draught");
  const VesselParams corrected = shallow_water_correct(p, env.depth, p.draught);
  const ResolvedParams rp = resolve(corrected);
  const ForceSet f = compute_forces(s, rp, env, propeller_rpm);
  VesselState next = ballistic_update(s, accelerations(s, rp, f), dt);
  if (!std::isfinite(next.x_n) || !std::isfinite(next.y_n) || !std::isfinite(next.psi) || !std::isfinite(next.u) ||
      !std::isfinite(next.v) || !std::isfinite(next.r))
    throw NumericFault("non-finite state after integration");
  return next;
}

/// Stepping front end that caches resolved coefficients for the last seen water depth.
class VesselModel {
 public:
  explicit VesselModel(VesselParams params) : params_(std::move(params)) {
    params_.validate();
    deep_ = resolve(params_);
  }

  VesselModel(const VesselModel& o) : params_(o.params_) { deep_ = resolve(params_); }
  VesselModel& operator=(const VesselModel& o) {
    if (this != &o) {
      params_ = o.params_;
      deep_ = resolve(params_);
      cached_depth_ = std::numeric_limits<double>::quiet_NaN();
    }
    return *this;
  }

  const VesselParams& params() const { return params_; }

  const ResolvedParams& resolved_for(double depth) {
    if (!(depth > params_.draught)) throw GroundingError("water depth below draught");
    if (depth / params_.draught >= params_.shallow_water.deep_threshold) return deep_;
    if (depth != cached_depth_) {
      shallow_params_ = shallow_water_correct(params_, depth, params_.draught);
      shallow_ = resolve(shallow_params_);
      cached_depth_ = depth;
    }
    return shallow_;
  }

  ForceSet forces(const VesselState& s, const EnvDisturbance& env, double rpm) {
    return compute_forces(s, resolved_for(env.depth), env, rpm);
  }

  VesselState step(const VesselState& s, const EnvDisturbance& env, double rpm, double dt = 5.0) {
    if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
    const ResolvedParams& rp = resolved_for(env.depth);
    const ForceSet f = compute_forces(s, rp, env, rpm);
    VesselState next = ballistic_update(s, accelerations(s, rp, f), dt);
    if (!std::isfinite(next.x_n) || !std::isfinite(next.y_n) || !std::isfinite(next.psi) || !std::isfinite(next.u) ||
        !std::isfinite(next.v) || !std::isfinite(next.r))
      throw NumericFault("non-finite state after integration");
    return next;
  }

  /// Propeller speed (rpm) whose thrust balances straight-ahead resistance at the given surge speed.
  double calibrate_rpm(double target_speed) const {
    VesselState s;
    s.u = target_speed;
    EnvDisturbance calm;
    auto surge = [&](double rpm) { return compute_forces(s, deep_, calm, rpm).x; };
    double lo = 0.0, hi = 60.0;
    while (surge(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e5) throw ParameterError("cannot calibrate propeller rpm");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
      const double mid = 0.5 * (lo + hi);
      (surge(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  VesselParams params_;
  ResolvedParams deep_;
  VesselParams shallow_params_;
  ResolvedParams shallow_;
  double cached_depth_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace asv
