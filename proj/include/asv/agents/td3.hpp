#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "asv/agents/networks.hpp"
#include "asv/agents/replay.hpp"

namespace asv::nn {

struct Td3Config {
  int batch = 32;
  double gamma = 0.99;
  double lr_actor = 1e-4;
  double lr_critic = 1e-4;
  std::size_t capacity = 500000;
  std::size_t min_fill = 5000;
  int policy_delay = 2;
  double tau = 0.001;
  double target_noise = 0.2;
  double noise_clip = 0.5;
  double explore_sigma = 0.1;
  int history = 2;
};

struct Td3Stats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double target_mean = 0.0;
  bool actor_updated = false;
};

struct PfSpec {
  using Obs = PfObservation;
  using History = PfHistory;
  using Batch = PfBatch;
  using Actor = PfActor;
  using Critic = PfCritic;
  static Batch make_batch(const std::vector<const History*>& hs) { return make_pf_batch(hs); }
  static Actor make_actor(Rng& rng) { return Actor(rng); }
  static Critic make_critic(Rng& rng) { return Critic(rng); }
};

struct LppSpec {
  using Obs = LppObservation;
  using History = LppHistory;
  using Batch = LppBatch;
  using Actor = LppActor;
  using Critic = LppCritic;
  static Batch make_batch(const std::vector<const History*>& hs) { return make_lpp_batch(hs); }
  static Actor make_actor(Rng& rng) { return Actor(rng); }
  static Critic make_critic(Rng& rng) { return Critic(rng); }
};

template <class Spec>
class Td3Agent {
 public:
  using Obs = typename Spec::Obs;
  using History = typename Spec::History;
  using Batch = typename Spec::Batch;
  using Sample = ReplaySample<Obs>;

  Td3Agent(const Td3Config& cfg, std::uint64_t seed)
      : cfg_(cfg), buffer_(cfg.capacity, cfg.history), explore_rng_(derive_seed(seed, 1)),
        update_rng_(derive_seed(seed, 2)), opt_actor_(cfg.lr_actor), opt_q1_(cfg.lr_critic), opt_q2_(cfg.lr_critic) {
    if (cfg.batch <= 0 || cfg.policy_delay <= 0) throw ConfigError("batch and policy delay must be positive");
    if (cfg.tau < 0.0 || cfg.tau > 1.0) throw ConfigError("soft update rate must lie in [0, 1]");
    Rng init(derive_seed(seed, 0));
    actor_ = Spec::make_actor(init);
    q1_ = Spec::make_critic(init);
    q2_ = Spec::make_critic(init);
    actor_t_ = actor_;
    q1_t_ = q1_;
    q2_t_ = q2_;
  }

  const Td3Config& config() const { return cfg_; }
  ReplayBuffer<Obs>& buffer() { return buffer_; }
  const ReplayBuffer<Obs>& buffer() const { return buffer_; }
  long long updates() const { return updates_; }

  typename Spec::Actor& actor() { return actor_; }
  typename Spec::Actor& actor_target() { return actor_t_; }
  typename Spec::Critic& critic1() { return q1_; }
  typename Spec::Critic& critic2() { return q2_; }
  typename Spec::Critic& critic1_target() { return q1_t_; }
  typename Spec::Critic& critic2_target() { return q2_t_; }

  /// Every network with its name prefix, in artifact order.
  std::vector<std::pair<std::string, ParamList>> networks() {
    return {{"actor/", actor_.params()},       {"critic1/", q1_.params()},        {"critic2/", q2_.params()},
            {"actor_target/", actor_t_.params()}, {"critic1_target/", q1_t_.params()}, {"critic2_target/", q2_t_.params()}};
  }

  double act(const History& h) { return actor_.act(h); }

  double explore(const History& h) {
    const double a = act(h) + explore_rng_.normal(0.0, cfg_.explore_sigma);
    return std::clamp(a, -1.0, 1.0);
  }

  double random_action() { return explore_rng_.uniform(-1.0, 1.0); }

  bool ready() const { return buffer_.size() >= cfg_.min_fill; }

  Td3Stats update() {
    if (!ready()) throw PreconditionError("update requested before the replay buffer reached its minimum fill");
    return update_on(buffer_.sample(static_cast<std::size_t>(cfg_.batch), update_rng_));
  }

  Td3Stats update_on(const std::vector<Sample>& batch) {
    if (batch.empty()) throw PreconditionError("empty training batch");
    const auto B = static_cast<Eigen::Index>(batch.size());
    std::vector<const History*> hs, hs2;
    Mat a(B, 1), r(B, 1), notdone(B, 1);
    for (Eigen::Index i = 0; i < B; ++i) {
      const Sample& s = batch[static_cast<std::size_t>(i)];
      hs.push_back(&s.history);
      hs2.push_back(&s.next_history);
      a(i, 0) = s.action;
      r(i, 0) = s.reward;
      notdone(i, 0) = s.done ? 0.0 : 1.0;
    }
    const Batch o = Spec::make_batch(hs);
    const Batch o2 = Spec::make_batch(hs2);

    Mat a2 = actor_t_.forward(o2);
    for (Eigen::Index i = 0; i < B; ++i) {
      const double eps = std::clamp(update_rng_.normal(0.0, cfg_.target_noise), -cfg_.noise_clip, cfg_.noise_clip);
      a2(i, 0) = std::clamp(a2(i, 0) + eps, -1.0, 1.0);
    }
    const Mat qt = q1_t_.forward(o2, a2).cwiseMin(q2_t_.forward(o2, a2));
    Mat y = r;
    if (cfg_.gamma != 0.0) y += cfg_.gamma * notdone.cwiseProduct(qt);

    Td3Stats st;
    st.target_mean = y.mean();
    last_targets_ = y;
    st.critic_loss = critic_step(q1_, opt_q1_, o, a, y) + critic_step(q2_, opt_q2_, o, a, y);
    st.critic_loss *= 0.5;

    ++updates_;
    if (updates_ % cfg_.policy_delay == 0) {
      zero_grads(actor_.params());
      const Mat pa = actor_.forward(o);
      const Mat q = q1_.forward(o, pa);
      st.actor_loss = -q.mean();
      const Mat da = q1_.backward(Mat::Constant(B, 1, -1.0 / static_cast<double>(B)), false);
      actor_.backward(da);
      opt_actor_.step(actor_.params());
      soft_update(actor_t_.params(), actor_.params(), cfg_.tau);
      soft_update(q1_t_.params(), q1_.params(), cfg_.tau);
      soft_update(q2_t_.params(), q2_.params(), cfg_.tau);
      st.actor_updated = true;
    }
    return st;
  }

  /// TD targets of the most recent update.
  const Mat& last_targets() const { return last_targets_; }

 private:
  template <class Critic>
  static double critic_step(Critic& q, Adam& opt, const Batch& o, const Mat& a, const Mat& y) {
    zero_grads(q.params());
    const Mat diff = q.forward(o, a) - y;
    const double B = static_cast<double>(diff.rows());
    q.backward(diff * (2.0 / B));
    opt.step(q.params());
    return diff.squaredNorm() / B;
  }

  Td3Config cfg_;
  ReplayBuffer<Obs> buffer_;
  Rng explore_rng_, update_rng_;
  typename Spec::Actor actor_, actor_t_;
  typename Spec::Critic q1_, q2_, q1_t_, q2_t_;
  Adam opt_actor_, opt_q1_, opt_q2_;
  long long updates_ = 0;
  Mat last_targets_;
};

}  // namespace asv::nn
