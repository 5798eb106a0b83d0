#pragma once

#include <cmath>

namespace asv {

/// Navigational status: position and heading in the NED frame, velocities over ground in the body frame.
struct VesselState {
  double x_n = 0.0;    ///< north (m)
  double y_n = 0.0;    ///< east (m)
  double psi = 0.0;    ///< heading (rad), [0, 2π)
  double u = 0.0;      ///< surge (m/s)
  double v = 0.0;      ///< sway (m/s)
  double r = 0.0;      ///< yaw rate (rad/s)
  double delta = 0.0;  ///< rudder angle (rad)

  double speed() const { return std::hypot(u, v); }
  double course() const { return psi + std::atan2(v, u); }

  friend bool operator==(const VesselState&, const VesselState&) = default;
};

/// Environmental conditions at the vessel. Angles give the direction a current, wind or wave train
/// travels toward, measured clockwise from north.
struct EnvDisturbance {
  double current_speed = 0.0;
  double current_angle = 0.0;
  double wind_speed = 0.0;
  double wind_angle = 0.0;
  double wave_amplitude = 0.0;
  double wave_angle = 0.0;
  double wave_period = 0.0;
  double wave_length = 0.0;
  double depth = 100.0;

  friend bool operator==(const EnvDisturbance&, const EnvDisturbance&) = default;
};

struct ForceComponent {
  double x = 0.0;
  double y = 0.0;
  double n = 0.0;
};

/// Surge force, sway force and yaw moment with the per-source breakdown.
struct ForceSet {
  ForceComponent hull;
  ForceComponent rudder;
  ForceComponent propeller;  ///< surge only
  ForceComponent wind;
  ForceComponent wave;
  double x = 0.0;
  double y = 0.0;
  double n = 0.0;

  /// Totals in the fixed order hull, rudder, propeller, wind, wave.
  void sum() {
    x = hull.x + rudder.x + propeller.x + wind.x + wave.x;
    y = hull.y + rudder.y + propeller.y + wind.y + wave.y;
    n = hull.n + rudder.n + propeller.n + wind.n + wave.n;
  }
};

struct Accelerations {
  double u_dot = 0.0;
  double v_dot = 0.0;
  double r_dot = 0.0;
};

}  // namespace asv
