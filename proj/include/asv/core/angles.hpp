#pragma once

#include <cmath>
#include <numbers>

namespace asv {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kNauticalMile = 1852.0;

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Maps an angle into [lo, lo + 2π).
inline double wrap_angle(double angle, double lo) {
  double x = std::fmod(angle - lo, kTwoPi);
  if (x < 0.0) x += kTwoPi;
  if (x >= kTwoPi) x -= kTwoPi;
  return x + lo;
}

/// [−π, π)
inline double wrap_pi(double angle) { return wrap_angle(angle, -kPi); }

/// [0, 2π)
inline double wrap_2pi(double angle) { return wrap_angle(angle, 0.0); }

/// Bearing of the vector (dn, de) in the NED frame, measured clockwise from north.
inline double bearing_of(double dn, double de) { return wrap_2pi(std::atan2(de, dn)); }

}  // namespace asv
