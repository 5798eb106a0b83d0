#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace asv {

struct Vec2 {
  double n = 0.0;  ///< north
  double e = 0.0;  ///< east

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.n + b.n, a.e + b.e}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.n - b.n, a.e - b.e}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.n, s * a.e}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.n, s * a.e}; }
  friend bool operator==(Vec2, Vec2) = default;

  double norm() const { return std::hypot(n, e); }
  double dot(Vec2 o) const { return n * o.n + e * o.e; }
  /// z-component of the cross product; positive when o lies to starboard of *this.
  double cross(Vec2 o) const { return n * o.e - e * o.n; }
};

inline Vec2 heading_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Piecewise-linear interpolation over sorted abscissae, clamped at both ends.
inline double interp_clamped(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

}  // namespace asv
