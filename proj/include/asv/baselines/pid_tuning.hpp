#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "asv/baselines/pid.hpp"
#include "asv/baselines/pso.hpp"
#include "asv/harness/pf_scenarios.hpp"

namespace asv {

/// One environment step under PID rudder control using the noise-free course error and yaw rate.
inline PfStepResult pid_step(PfEnv& env, PidController& pid) {
  const VesselState& s = env.state();
  return env.step_rudder(pid.command(env.course_error_now(), s.r, s.delta));
}

inline PfRunResult run_pf_pid(PfEnv& env, const PfScenario& sc, const PidGains& g, std::uint64_t seed,
                              bool keep_log = true) {
  PidController pid(g);
  return run_pf(env, sc, seed, [&](PfEnv& e, const PfHistory&) { return pid_step(e, pid); }, keep_log);
}

struct PidObjectiveConfig {
  double off_river_penalty = 1e7;
  std::vector<PfScenario> suite = pf_validation_suite();
};

/// Σ over the suite of (penalty · left-the-river flag + Σ_t χ_e²).
inline double pid_tuning_objective(PfEnv& env, const PidGains& g, std::uint64_t seed, const PidObjectiveConfig& c = {}) {
  if (!g.finite()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (const PfScenario& sc : c.suite) {
    const PfRunResult r = run_pf_pid(env, sc, g, seed, false);
    total += (r.off_river ? c.off_river_penalty : 0.0) + r.sum_chi2;
  }
  return total;
}

inline PidGains gains_from_particle(const std::vector<double>& x) { return {x.at(0), x.at(1), x.at(2)}; }

struct PidTuningResult {
  PidGains gains;
  PsoResult pso;
};

inline PidTuningResult tune_pid(std::uint64_t seed, const PsoConfig& pso = pid_pso_config(),
                                const PidObjectiveConfig& oc = {}, const PfConfig& pf = pf_scenario_config()) {
  PfEnv env(pf);
  const auto f = [&](const std::vector<double>& x) { return pid_tuning_objective(env, gains_from_particle(x), seed, oc); };
  PidTuningResult r;
  r.pso = pso_minimize(f, pso, derive_seed(seed, 7));
  r.gains = gains_from_particle(r.pso.best);
  return r;
}

}  // namespace asv
