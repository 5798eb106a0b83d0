#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "asv/core/angles.hpp"
#include "asv/core/math.hpp"
#include "asv/core/rng.hpp"
#include "asv/guidance/path.hpp"
#include "asv/world/raster.hpp"

namespace asv {

struct WaterwayConfig {
  double straight_base = 400.0;
  int straight_steps = 32;
  double straight_step = 50.0;
  double radius_base = 1000.0;
  int radius_steps = 4000;
  double angle_base_deg = 60.0;
  int angle_steps = 40;
  double curve_resolution_deg = 2.0;
  double target_length = 20000.0;
  double depth_mean = 35.0;
  double depth_min = 20.0;
  double depth_max = 100.0;
  double depth_noise = 2.0;
  double reversed_offset = 200.0;
  double half_width = 250.0;
  double cell_size = 20.0;
  double start_arc = 2000.0;  ///< own-ship spawn arc length on the global path
};

inline double sample_straight_length(Rng& rng, const WaterwayConfig& c = {}) {
  return c.straight_base + rng.uniform_int(0, c.straight_steps) * c.straight_step;
}
inline double sample_curve_radius(Rng& rng, const WaterwayConfig& c = {}) {
  return c.radius_base + rng.uniform_int(0, c.radius_steps) * 1.0;
}
/// Curve angle in radians.
inline double sample_curve_angle(Rng& rng, const WaterwayConfig& c = {}) {
  return deg2rad(c.angle_base_deg + rng.uniform_int(0, c.angle_steps) * 1.0);
}
inline double sample_max_depth(Rng& rng, const WaterwayConfig& c = {}) {
  return rng.clipped_exponential(c.depth_mean, c.depth_min, c.depth_max);
}

/// Global path, reversed path for opposing traffic, and gridded depth field.
struct Waterway {
  Path global;
  Path reversed;
  DepthRaster raster;
  double max_depth = 0.0;
  WaterwayConfig config;

  double depth_at(Vec2 p) const { return raster.depth_at(p); }

  /// Signed offset from the global path, positive to starboard.
  double lateral_offset(Vec2 p) const { return global.project(p).lateral; }

  /// True when p lies past the reversed path as seen from the global path.
  bool beyond_opposing_path(Vec2 p) const { return reversed.project(p).lateral > 0.0; }
};

/// Depth field around `global`: water in the band [−offset/2 − half_width, −offset/2 + half_width]
/// of signed distance to the path, land (depth 0) elsewhere. Wet cells get `max_depth` plus noise.
inline DepthRaster rasterize_channel(const Path& global, double max_depth, Rng& noise_rng, const WaterwayConfig& c) {
  const double centre = -0.5 * c.reversed_offset;
  const double lo = centre - c.half_width, hi = centre + c.half_width;
  const double reach = std::max(std::abs(lo), std::abs(hi)) + 2.0 * c.cell_size;

  double nmin = std::numeric_limits<double>::infinity(), emin = nmin;
  double nmax = -nmin, emax = -nmin;
  for (const Vec2& w : global.waypoints()) {
    nmin = std::min(nmin, w.n);
    nmax = std::max(nmax, w.n);
    emin = std::min(emin, w.e);
    emax = std::max(emax, w.e);
  }
  const double cell = c.cell_size;
  const double on = std::floor((nmin - reach) / cell) * cell;
  const double oe = std::floor((emin - reach) / cell) * cell;
  const auto rows = static_cast<std::uint32_t>(std::ceil((nmax + reach - on) / cell));
  const auto cols = static_cast<std::uint32_t>(std::ceil((emax + reach - oe) / cell));
  DepthRaster r(cell, on, oe, rows, cols);

  std::vector<double> best(static_cast<std::size_t>(rows) * cols, std::numeric_limits<double>::infinity());
  std::vector<double> signed_dist(best.size(), 0.0);
  auto clamp_index = [](double v, std::uint32_t n) {
    return static_cast<std::uint32_t>(std::clamp(v, 0.0, static_cast<double>(n) - 1.0));
  };
  for (std::size_t k = 0; k < global.num_segments(); ++k) {
    const Vec2 a = global.waypoint(k), b = global.waypoint(k + 1);
    const Vec2 t = heading_vector(global.course(k));
    const double len = global.segment_length(k);
    const std::uint32_t r0 = clamp_index(std::floor((std::min(a.n, b.n) - reach - on) / cell), rows);
    const std::uint32_t r1 = clamp_index(std::floor((std::max(a.n, b.n) + reach - on) / cell), rows);
    const std::uint32_t c0 = clamp_index(std::floor((std::min(a.e, b.e) - reach - oe) / cell), cols);
    const std::uint32_t c1 = clamp_index(std::floor((std::max(a.e, b.e) + reach - oe) / cell), cols);
    for (std::uint32_t i = r0; i <= r1; ++i) {
      for (std::uint32_t j = c0; j <= c1; ++j) {
        const Vec2 p = r.cell_center(i, j);
        const Vec2 d = p - a;
        const double along = std::clamp(d.dot(t), 0.0, len);
        const double dist = (p - (a + along * t)).norm();
        const std::size_t idx = static_cast<std::size_t>(i) * cols + j;
        if (dist < best[idx]) {
          best[idx] = dist;
          signed_dist[idx] = t.cross(d) >= 0.0 ? dist : -dist;
        }
      }
    }
  }
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * cols + j;
      const double y = signed_dist[idx];
      if (std::isfinite(best[idx]) && y >= lo && y <= hi) {
        r.depth(i, j) = std::max(0.0, max_depth + noise_rng.uniform(-c.depth_noise, c.depth_noise));
      }
      if (std::isfinite(best[idx]) && y < -c.reversed_offset) r.set_beyond(i, j, true);
    }
  }
  return r;
}

/// Builds a waterway around a given global path with a uniform maximum depth.
inline Waterway make_waterway(const Path& global, double max_depth, std::uint64_t noise_seed,
                              const WaterwayConfig& c = {}) {
  Waterway w;
  w.config = c;
  w.global = global;
  w.reversed = global.reversed_offset(c.reversed_offset);
  w.max_depth = max_depth;
  Rng noise(noise_seed);
  w.raster = rasterize_channel(global, max_depth, noise, c);
  return w;
}

/// Alternating straight and curved segments until the target length is reached.
inline Path generate_global_path(Rng& rng, const WaterwayConfig& c = {}) {
  std::vector<Vec2> wp{{0.0, 0.0}};
  double chi = rng.uniform(0.0, kTwoPi);
  double length = 0.0;
  for (;;) {
    const double straight = sample_straight_length(rng, c);
    wp.push_back(wp.back() + straight * heading_vector(chi));
    length += straight;
    if (length >= c.target_length) break;
    const double radius = sample_curve_radius(rng, c);
    const double angle = sample_curve_angle(rng, c);
    const double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const int n = std::max(1, static_cast<int>(std::ceil(rad2deg(angle) / c.curve_resolution_deg)));
    const double dtheta = angle / n;
    const double chord = 2.0 * radius * std::sin(0.5 * dtheta);
    for (int j = 0; j < n; ++j) {
      wp.push_back(wp.back() + chord * heading_vector(chi + dir * (j + 0.5) * dtheta));
      length += chord;
    }
    chi = wrap_2pi(chi + dir * angle);
  }
  return Path(std::move(wp));
}

inline Waterway generate_waterway(std::uint64_t seed, const WaterwayConfig& c = {}) {
  Rng rng(seed);
  Path global = generate_global_path(rng, c);
  const double depth = sample_max_depth(rng, c);
  return make_waterway(global, depth, rng.next_u64(), c);
}

constexpr int kRayPoints = 50;
constexpr double kRayMin = 10.0;
constexpr double kRayMax = kNauticalMile;

/// Geometric sample distances from 10 m to 1 NM.
inline const std::array<double, kRayPoints>& ray_ladder() {
  static const std::array<double, kRayPoints> ladder = [] {
    std::array<double, kRayPoints> d{};
    for (int j = 0; j < kRayPoints; ++j) d[j] = kRayMin * std::pow(kRayMax / kRayMin, j / double(kRayPoints - 1));
    d[kRayPoints - 1] = kRayMax;
    return d;
  }();
  return ladder;
}

/// Point is unusable: off-grid, too shallow, or past the opposing path.
inline bool ray_blocked(const DepthRaster& r, Vec2 p, double required_depth) {
  return !r.contains(p) || r.depth_at(p) < required_depth || r.beyond_opposing(p);
}

/// Distance to the first blocked ladder sample along ψ + γ; 0 if the start is blocked, 1 NM if none is.
inline double boundary_ray(const DepthRaster& r, Vec2 position, double heading, double gamma, double required_depth) {
  if (ray_blocked(r, position, required_depth)) return 0.0;
  const Vec2 dir = heading_vector(heading + gamma);
  for (double d : ray_ladder()) {
    if (ray_blocked(r, position + d * dir, required_depth)) return d;
  }
  return kRayMax;
}

inline double boundary_ray(const Waterway& w, Vec2 position, double heading, double gamma, double required_depth) {
  return boundary_ray(w.raster, position, heading, gamma, required_depth);
}

}  // namespace asv
