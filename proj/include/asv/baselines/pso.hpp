#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "asv/core/errors.hpp"
#include "asv/core/rng.hpp"

namespace asv {

/// Global-best particle swarm with linearly decaying inertia and per-dimension velocity clamp.
struct PsoConfig {
  int particles = 20;
  int iterations = 1000;
  double w_start = 0.9;
  double w_end = 0.4;
  double c1 = 2.0;
  double c2 = 2.0;
  std::vector<double> init_lo, init_hi;  ///< initial position box
  std::vector<double> v_max;             ///< initial velocities are drawn from ±v_max, updates are clamped to it

  void validate() const {
    const std::size_t n = init_lo.size();
    if (n == 0 || init_hi.size() != n || v_max.size() != n) throw ConfigError("PSO bounds must share one dimension");
    if (particles <= 0 || iterations < 0) throw ConfigError("PSO needs positive particles and non-negative iterations");
    for (std::size_t i = 0; i < n; ++i)
      if (!(init_lo[i] <= init_hi[i]) || !(v_max[i] > 0.0)) throw ConfigError("invalid PSO box or velocity");
  }
};

/// Ranges for (K_p, K_i, K_d).
inline PsoConfig pid_pso_config() {
  PsoConfig c;
  c.init_lo = {0.25, 0.025, 10.0};
  c.init_hi = {3.75, 0.075, 30.0};
  c.v_max = {0.05, 0.05, 1.0};
  return c;
}

struct PsoResult {
  std::vector<double> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> history;  ///< global best after initialisation and after each iteration
  std::vector<double> initial_values;
  long long evaluations = 0;
  long long discarded = 0;
};

using PsoObjective = std::function<double(const std::vector<double>&)>;
using PsoWarning = std::function<void(const std::string&)>;

inline PsoResult pso_minimize(const PsoObjective& f, const PsoConfig& c, std::uint64_t seed,
                              const PsoWarning& warn = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; }) {
  c.validate();
  const std::size_t dim = c.init_lo.size();
  const auto np = static_cast<std::size_t>(c.particles);
  Rng rng(seed);
  std::vector<std::vector<double>> x(np, std::vector<double>(dim)), v = x, pbest = x;
  std::vector<double> pval(np, std::numeric_limits<double>::infinity());
  PsoResult res;

  const auto evaluate = [&](std::size_t i) {
    const double y = f(x[i]);
    ++res.evaluations;
    if (std::isnan(y)) {
      ++res.discarded;
      if (warn) warn("objective returned NaN; particle " + std::to_string(i) + " ignored for best tracking");
      return y;
    }
    if (y < pval[i]) {
      pval[i] = y;
      pbest[i] = x[i];
    }
    if (y < res.best_value) {
      res.best_value = y;
      res.best = x[i];
    }
    return y;
  };

  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      x[i][d] = rng.uniform(c.init_lo[d], c.init_hi[d]);
      v[i][d] = rng.uniform(-c.v_max[d], c.v_max[d]);
    }
    pbest[i] = x[i];
  }
  for (std::size_t i = 0; i < np; ++i) res.initial_values.push_back(evaluate(i));
  if (res.best.empty()) res.best = x.front();
  res.history.push_back(res.best_value);

  for (int it = 0; it < c.iterations; ++it) {
    const double w = c.iterations > 1 ? c.w_start + (c.w_end - c.w_start) * it / (c.iterations - 1) : c.w_start;
    const std::vector<double> g = res.best;
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = rng.uniform(0.0, 1.0), r2 = rng.uniform(0.0, 1.0);
        const double vel = w * v[i][d] + c.c1 * r1 * (pbest[i][d] - x[i][d]) + c.c2 * r2 * (g[d] - x[i][d]);
        v[i][d] = std::clamp(vel, -c.v_max[d], c.v_max[d]);
        x[i][d] += v[i][d];
      }
      evaluate(i);
    }
    res.history.push_back(res.best_value);
  }
  return res;
}

}  // namespace asv
