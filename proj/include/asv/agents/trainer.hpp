#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "asv/agents/td3.hpp"
#include "asv/agents/weights.hpp"

namespace asv::nn {

inline bool is_terminal(const PfStepInfo& i) { return i.off_path || i.infeasible; }
inline bool is_terminal(const LppStepInfo& i) { return i.off_path; }

/// Path following on a straight channel without disturbances, starting with a small random
/// lateral and heading offset.
class PfStraightEnv {
 public:
  explicit PfStraightEnv(PfConfig cfg = {}, double length = 15000.0, double depth = 30.0) : env_(disturbance_free(cfg)) {
    path_ = Path({{0.0, 0.0}, {length, 0.0}});
    waterway_ = std::make_shared<const Waterway>(make_waterway(path_, depth, 1));
  }

  double max_lateral = 50.0;
  double max_heading_deg = 15.0;
  double start_arc = 1000.0;

  PfHistory reset(std::uint64_t seed) {
    Rng rng(seed);
    VesselState s;
    s.x_n = start_arc;
    s.y_n = rng.uniform(-max_lateral, max_lateral);
    s.psi = deg2rad(rng.uniform(-max_heading_deg, max_heading_deg));
    s.u = env_.config().nominal_speed;
    return env_.reset_to(waterway_, path_, s, {}, rng.next_u64(), env_.config().max_steps);
  }

  PfStepResult step(double a) { return env_.step(a); }
  PfEnv& inner() { return env_; }

 private:
  static PfConfig disturbance_free(PfConfig c) {
    c.disturbances = false;
    return c;
  }
  PfEnv env_;
  Path path_;
  std::shared_ptr<const Waterway> waterway_;
};

struct TrainConfig {
  long long total_steps = 50000;
  long long eval_every = 5000;
  int eval_episodes = 3;
  double smoothing = 0.8;
  std::uint64_t seed = 0;
  std::string out_dir;             ///< empty: no files written
  long long checkpoint_every = 0;  ///< 0: only at the end
  std::function<void(long long, double)> on_eval;
};

struct CurvePoint {
  long long step = 0;
  double ret = 0.0;
  double smoothed = 0.0;
};

struct TrainResult {
  std::vector<CurvePoint> curve;
  long long updates = 0;
  long long episodes = 0;
  double seconds = 0.0;
};

inline void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write learning curve: " + path);
  os.precision(17);
  os << "step,return,smoothed\n";
  for (const auto& p : curve) os << p.step << ',' << p.ret << ',' << p.smoothed << '\n';
}

/// Mean undiscounted return of the deterministic policy over fixed evaluation seeds.
template <class Spec, class Env>
double evaluate(Td3Agent<Spec>& agent, Env& env, int episodes, std::uint64_t seed) {
  double total = 0.0;
  for (int k = 0; k < episodes; ++k) {
    auto hist = env.reset(derive_seed(seed, 1000u + static_cast<std::uint64_t>(k)));
    for (;;) {
      auto r = env.step(agent.act(hist));
      total += r.reward;
      if (r.done) break;
      hist = std::move(r.observation);
    }
  }
  return total / episodes;
}

template <class Spec, class Env>
TrainResult train(Td3Agent<Spec>& agent, Env& env, Env& eval_env, const TrainConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  const auto flush = [&] {
    if (cfg.out_dir.empty()) return;
    save_weights(cfg.out_dir + "/agent.asvw", agent.networks(),
                 {{"step", res.curve.empty() ? 0 : res.curve.back().step}, {"updates", res.updates}, {"seed", cfg.seed}});
    write_curve_csv(cfg.out_dir + "/learning_curve.csv", res.curve);
  };

  auto hist = env.reset(derive_seed(cfg.seed, 10));
  bool episode_start = true;
  for (long long t = 1; t <= cfg.total_steps; ++t) {
    const double a = agent.ready() ? agent.explore(hist) : agent.random_action();
    typename Spec::History next;
    bool done = false;
    try {
      auto r = env.step(a);
      agent.buffer().add(hist.back(), a, r.reward, r.observation.back(), is_terminal(r.info), episode_start);
      done = r.done;
      next = std::move(r.observation);
    } catch (const Error&) {
      flush();
      throw;
    }
    episode_start = false;
    if (done) {
      ++res.episodes;
      hist = env.reset(derive_seed(cfg.seed, 10u + static_cast<std::uint64_t>(res.episodes)));
      episode_start = true;
    } else {
      hist = std::move(next);
    }
    if (agent.ready()) {
      agent.update();
      ++res.updates;
    }
    if (cfg.eval_every > 0 && t % cfg.eval_every == 0) {
      const double ret = evaluate(agent, eval_env, cfg.eval_episodes, cfg.seed);
      const double sm = res.curve.empty() ? ret : cfg.smoothing * res.curve.back().smoothed + (1.0 - cfg.smoothing) * ret;
      res.curve.push_back({t, ret, sm});
      if (cfg.on_eval) cfg.on_eval(t, ret);
    }
    if (cfg.checkpoint_every > 0 && t % cfg.checkpoint_every == 0) flush();
  }
  flush();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace asv::nn
