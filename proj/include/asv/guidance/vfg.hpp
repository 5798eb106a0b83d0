#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "asv/core/angles.hpp"
#include "asv/core/math.hpp"
#include "asv/guidance/path.hpp"

namespace asv {

struct TrackErrors {
  double y_e = 0.0;  ///< cross-track, positive to starboard of the segment direction
  double x_e = 0.0;  ///< along-track from P_k
  std::size_t k = 0;
};

inline TrackErrors track_errors(const Path& path, Vec2 position, std::size_t k) {
  const double chi = path.course(k);
  const Vec2 d = position - path.waypoint(k);
  const double c = std::cos(chi), s = std::sin(chi);
  return {-s * d.n + c * d.e, c * d.n + s * d.e, k};
}

/// Moves to the next segment while the along-track error exceeds the active segment length.
inline std::size_t advance_waypoint(const Path& path, Vec2 position, std::size_t k) {
  const std::size_t last = path.num_segments() - 1;
  while (k < last && track_errors(path, position, k).x_e > path.segment_length(k)) ++k;
  return std::min(k, last);
}

/// Weighted course of segments k and k+1; the last segment blends with itself.
inline double blended_course(const Path& path, const TrackErrors& e) {
  const double chi_k = path.course(e.k);
  if (e.k + 1 >= path.num_segments()) return chi_k;
  const double w = std::clamp(e.x_e / path.segment_length(e.k), 0.0, 1.0);
  return chi_k + w * wrap_pi(path.course(e.k + 1) - chi_k);
}

/// Vector-field guidance law. The result is not wrapped.
inline double desired_course(const Path& path, const TrackErrors& e, double k_gain) {
  return blended_course(path, e) - std::atan(k_gain * e.y_e);
}

/// χ_e = [χ_d − χ] in [−π, π).
inline double course_error(double chi_d, double chi) { return wrap_pi(chi_d - chi); }

/// Waypoint index, errors and desired course of a vessel tracking a path.
struct PathTracker {
  std::size_t k = 0;

  TrackErrors update(const Path& path, Vec2 position) {
    k = advance_waypoint(path, position, k);
    return track_errors(path, position, k);
  }
};

}  // namespace asv
