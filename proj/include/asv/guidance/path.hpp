#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/errors.hpp"
#include "asv/core/math.hpp"

namespace asv {

/// Polyline of waypoints P_0..P_M with per-segment course angles.
class Path {
 public:
  Path() = default;

  explicit Path(std::vector<Vec2> waypoints) : wp_(std::move(waypoints)) {
    if (wp_.size() < 2) throw PreconditionError("path needs at least two waypoints");
    cum_.assign(wp_.size(), 0.0);
    course_.resize(wp_.size() - 1);
    len_.resize(wp_.size() - 1);
    for (std::size_t k = 0; k + 1 < wp_.size(); ++k) {
      const Vec2 d = wp_[k + 1] - wp_[k];
      len_[k] = d.norm();
      if (!(len_[k] > 0.0)) throw PreconditionError("consecutive waypoints coincide");
      course_[k] = bearing_of(d.n, d.e);
      cum_[k + 1] = cum_[k] + len_[k];
    }
  }

  std::size_t num_waypoints() const { return wp_.size(); }
  std::size_t num_segments() const { return wp_.size() - 1; }
  const Vec2& waypoint(std::size_t i) const { return wp_[i]; }
  const std::vector<Vec2>& waypoints() const { return wp_; }

  /// χ_Pk of segment k.
  double course(std::size_t k) const { return course_[k]; }
  double segment_length(std::size_t k) const { return len_[k]; }
  /// Arc length from P_0 to P_k.
  double arc_at(std::size_t k) const { return cum_[k]; }
  double total_length() const { return cum_.back(); }

  std::size_t segment_at(double s) const {
    if (s <= 0.0) return 0;
    if (s >= total_length()) return num_segments() - 1;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()) - 1, num_segments() - 1);
  }

  /// Point at arc length s, extrapolating along the end segments outside [0, total].
  Vec2 point_at(double s) const {
    const std::size_t k = segment_at(s);
    const double t = s - cum_[k];
    return wp_[k] + t * heading_vector(course_[k]);
  }

  double course_at(double s) const { return course_[segment_at(s)]; }

  struct Projection {
    std::size_t k = 0;      ///< segment index
    double s = 0.0;         ///< arc length of the foot point (clamped to the segment)
    double lateral = 0.0;   ///< signed offset, positive to starboard
    double distance = 0.0;  ///< distance to the foot point
  };

  /// Nearest point on the polyline.
  Projection project(Vec2 p) const {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < num_segments(); ++k) {
      const Vec2 t = heading_vector(course_[k]);
      const Vec2 d = p - wp_[k];
      const double along = std::clamp(d.dot(t), 0.0, len_[k]);
      const Vec2 foot = wp_[k] + along * t;
      const double dist = (p - foot).norm();
      if (dist < best.distance) {
        best.k = k;
        best.s = cum_[k] + along;
        best.lateral = t.cross(d);
        best.distance = dist;
      }
    }
    return best;
  }

  /// Path offset by `offset` metres to port and traversed in the opposite direction.
  Path reversed_offset(double offset) const {
    std::vector<Vec2> out(wp_.size());
    auto port = [](double chi) { return Vec2{std::sin(chi), -std::cos(chi)}; };
    for (std::size_t i = 0; i < wp_.size(); ++i) {
      if (i == 0) {
        out[i] = wp_[i] + offset * port(course_.front());
      } else if (i + 1 == wp_.size()) {
        out[i] = wp_[i] + offset * port(course_.back());
      } else {
        const Vec2 a = port(course_[i - 1]), b = port(course_[i]);
        Vec2 m = a + b;
        const double mn = m.norm();
        m = (1.0 / mn) * m;
        const double c = m.dot(a);
        out[i] = wp_[i] + (offset / c) * m;
      }
    }
    std::reverse(out.begin(), out.end());
    return Path(std::move(out));
  }

 private:
  std::vector<Vec2> wp_;
  std::vector<double> course_, len_, cum_;
};

}  // namespace asv
