#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "asv/agents/trainer.hpp"

using namespace asv;
using namespace asv::nn;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double s = 1.0) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-s, s);
  return m;
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4}); }

/// Central-difference check of every entry of `targets` against the analytic gradient `grads`.
double max_fd_error(const std::function<double()>& loss, const std::vector<Mat*>& targets,
                    const std::vector<const Mat*>& grads, std::size_t stride = 1) {
  const double eps = 1e-6;
  double worst = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    Mat& m = *targets[k];
    for (Eigen::Index i = 0; i < m.size(); i += static_cast<Eigen::Index>(stride)) {
      const double keep = m.data()[i];
      m.data()[i] = keep + eps;
      const double up = loss();
      m.data()[i] = keep - eps;
      const double dn = loss();
      m.data()[i] = keep;
      worst = std::max(worst, rel_err(grads[k]->data()[i], (up - dn) / (2 * eps)));
    }
  }
  return worst;
}

std::vector<Mat*> values(const ParamList& ps) {
  std::vector<Mat*> v;
  for (auto* t : ps) v.push_back(&t->value);
  return v;
}

std::vector<const Mat*> gradients(const ParamList& ps) {
  std::vector<const Mat*> v;
  for (auto* t : ps) v.push_back(&t->grad);
  return v;
}

double weighted(const Mat& y, const Mat& c) { return y.cwiseProduct(c).sum(); }

PfObservation pf_obs(Rng& rng) {
  PfObservation o;
  for (auto& x : o) x = rng.uniform(-1, 1);
  return o;
}

LppObservation lpp_obs(Rng& rng, int targets) {
  LppObservation o;
  for (auto& x : o.own) x = rng.uniform(-1, 1);
  for (auto& x : o.waterway) x = rng.uniform(0, 1);
  o.targets.clear();
  for (int i = 0; i < targets; ++i) {
    LppTargetFeatures f;
    for (auto& x : f) x = rng.uniform(-1, 1);
    o.targets.push_back(f);
  }
  return o;
}

LppHistory lpp_history(Rng& rng, std::vector<int> counts) {
  LppHistory h;
  for (int n : counts) h.push_back(lpp_obs(rng, n));
  return h;
}

}  // namespace

TEST(GradCheck, Dense) {
  Rng rng(1);
  Dense d("d", 5, 4, rng);
  Mat x = random_mat(3, 5, rng), c = random_mat(3, 4, rng);
  zero_grads(d.params());
  d.forward(x);
  const Mat dx = d.backward(c);
  const auto loss = [&] { return weighted(d.forward(x), c); };
  EXPECT_LT(max_fd_error(loss, values(d.params()), gradients(d.params())), 1e-4);
  EXPECT_LT(max_fd_error(loss, {&x}, {&dx}), 1e-4);
}

TEST(GradCheck, Activations) {
  Rng rng(2);
  Mat x = random_mat(4, 6, rng, 2.0), c = random_mat(4, 6, rng);
  Tanh t;
  t.forward(x);
  const Mat dt = t.backward(c);
  EXPECT_LT(max_fd_error([&] { return weighted(Tanh{}.forward(x), c); }, {&x}, {&dt}), 1e-4);
  Relu r;
  r.forward(x);
  const Mat dr = r.backward(c);
  EXPECT_LT(max_fd_error([&] { return weighted(Relu{}.forward(x), c); }, {&x}, {&dr}), 1e-4);
}

TEST(GradCheck, Concatenation) {
  Rng rng(3);
  Mat a = random_mat(3, 2, rng), b = random_mat(3, 4, rng), c = random_mat(3, 6, rng);
  const Mat da = c.leftCols(2), db = c.rightCols(4);
  const auto loss = [&] { return weighted(hcat(a, b), c); };
  EXPECT_LT(max_fd_error(loss, {&a, &b}, {&da, &db}), 1e-4);
}

TEST(GradCheck, LstmWithRaggedMask) {
  Rng rng(4);
  Lstm l("l", 3, 5, rng);
  std::vector<Mat> xs{random_mat(4, 3, rng), random_mat(4, 3, rng), random_mat(4, 3, rng)};
  std::vector<Vec> masks(3, Vec::Ones(4));
  masks[0][1] = 0.0;
  masks[0][2] = 0.0;
  masks[1][2] = 0.0;
  const Mat c = random_mat(4, 5, rng);
  zero_grads(l.params());
  l.forward(xs, masks);
  const std::vector<Mat> dxs = l.backward(c);
  const auto loss = [&] { return weighted(l.forward(xs, masks), c); };
  EXPECT_LT(max_fd_error(loss, values(l.params()), gradients(l.params())), 1e-4);
  EXPECT_LT(max_fd_error(loss, {&xs[0], &xs[1], &xs[2]}, {&dxs[0], &dxs[1], &dxs[2]}), 1e-4);
  EXPECT_EQ(dxs[0].row(1).norm(), 0.0);
}

TEST(Lstm, MaskedRowsMatchShorterSequence) {
  Rng rng(5);
  Lstm l("l", 3, 4, rng);
  const Mat x1 = random_mat(1, 3, rng), x2 = random_mat(1, 3, rng);
  Mat pad(2, 3);
  pad.row(0) = random_mat(1, 3, rng);
  pad.row(1) = x1;
  Mat second(2, 3);
  second.row(0) = x1;
  second.row(1) = x2;
  Vec m0(2);
  m0 << 0.0, 1.0;
  const Mat batched = l.forward({pad, second}, {m0, Vec::Ones(2)});
  const Mat alone = l.forward({x1});
  EXPECT_LT((batched.row(0) - alone.row(0)).norm(), 1e-15);
}

TEST(GradCheck, PfActorAndCritic) {
  Rng rng(6);
  PfNetConfig small{6, 5};
  PfActor actor(rng, small);
  PfCritic critic(rng, small);
  std::vector<PfHistory> hs(3);
  for (auto& h : hs)
    for (int l = 0; l < 3; ++l) h.push_back(pf_obs(rng));
  std::vector<const PfHistory*> ptrs{&hs[0], &hs[1], &hs[2]};
  const PfBatch b = make_pf_batch(ptrs);
  const Mat c = random_mat(3, 1, rng);
  Mat a = random_mat(3, 1, rng, 0.9);

  zero_grads(actor.params());
  actor.forward(b);
  actor.backward(c);
  EXPECT_LT(max_fd_error([&] { return weighted(actor.forward(b), c); }, values(actor.params()), gradients(actor.params())), 1e-4);

  zero_grads(critic.params());
  critic.forward(b, a);
  const Mat da = critic.backward(c);
  const auto q = [&] { return weighted(critic.forward(b, a), c); };
  EXPECT_LT(max_fd_error(q, values(critic.params()), gradients(critic.params())), 1e-4);
  EXPECT_LT(max_fd_error(q, {&a}, {&da}), 1e-4);

  critic.forward(b, a);
  const Mat da_only = critic.backward(c, false);
  EXPECT_EQ(da_only, da);
}

TEST(GradCheck, LppActorAndCriticThreeTargets) {
  Rng rng(7);
  LppNetConfig small{6, 5, 3};
  LppActor actor(rng, small);
  LppCritic critic(rng, small);
  std::vector<LppHistory> hs{lpp_history(rng, {3, 3, 3}), lpp_history(rng, {1, 2, 3}), lpp_history(rng, {3, 1, 2})};
  std::vector<const LppHistory*> ptrs{&hs[0], &hs[1], &hs[2]};
  const LppBatch b = make_lpp_batch(ptrs);
  const Mat c = random_mat(3, 1, rng);
  Mat a = random_mat(3, 1, rng, 0.9);

  zero_grads(actor.params());
  actor.forward(b);
  actor.backward(c);
  EXPECT_LT(max_fd_error([&] { return weighted(actor.forward(b), c); }, values(actor.params()), gradients(actor.params())), 1e-4);

  zero_grads(critic.params());
  critic.forward(b, a);
  const Mat da = critic.backward(c);
  const auto q = [&] { return weighted(critic.forward(b, a), c); };
  EXPECT_LT(max_fd_error(q, values(critic.params()), gradients(critic.params())), 1e-4);
  EXPECT_LT(max_fd_error(q, {&a}, {&da}), 1e-4);
}

TEST(GradCheck, LppFullWidthSampled) {
  Rng rng(8);
  LppActor actor(rng);
  const LppHistory h = lpp_history(rng, {3, 3, 3});
  const LppBatch b = make_lpp_batch(h);
  const Mat c = Mat::Constant(1, 1, 1.0);
  zero_grads(actor.params());
  actor.forward(b);
  actor.backward(c);
  EXPECT_LT(max_fd_error([&] { return weighted(actor.forward(b), c); }, values(actor.params()), gradients(actor.params()), 37), 1e-4);
}

TEST(Backward, LinearInLossScale) {
  Rng rng(9);
  PfActor actor(rng, {6, 5});
  PfHistory h{pf_obs(rng), pf_obs(rng), pf_obs(rng)};
  const PfBatch b = make_pf_batch(h);
  zero_grads(actor.params());
  actor.forward(b);
  actor.backward(Mat::Constant(1, 1, 1.0));
  std::vector<Mat> g1;
  for (auto* t : actor.params()) g1.push_back(t->grad);
  zero_grads(actor.params());
  actor.forward(b);
  actor.backward(Mat::Constant(1, 1, 3.0));
  const auto ps = actor.params();
  for (std::size_t k = 0; k < ps.size(); ++k) EXPECT_LT((ps[k]->grad - 3.0 * g1[k]).norm(), 1e-12 * (1.0 + g1[k].norm()));
}

TEST(Backward, UnusedParameterHasZeroGradient) {
  Rng rng(10);
  Dense d("d", 3, 2, rng);
  const Mat x = random_mat(4, 3, rng);
  Mat c = Mat::Zero(4, 2);
  c.col(0).setOnes();
  zero_grads(d.params());
  d.forward(x);
  d.backward(c);
  EXPECT_EQ(d.W.grad.col(1).norm(), 0.0);
  EXPECT_EQ(d.b.grad(0, 1), 0.0);
}

TEST(Backward, NonFiniteGradientIsNumericFault) {
  Rng rng(11);
  Dense d("d", 2, 2, rng);
  d.W.grad(0, 0) = std::nan("");
  Adam opt(1e-3);
  EXPECT_THROW(opt.step(d.params()), NumericFault);
}

TEST(Actor, ZeroWeightsGiveZeroAction) {
  Rng rng(12);
  LppActor actor(rng);
  for (auto* t : actor.params()) t->value.setZero();
  EXPECT_EQ(actor.act(lpp_history(rng, {2, 2, 2})), 0.0);
  PfActor pf(rng);
  for (auto* t : pf.params()) t->value.setZero();
  EXPECT_EQ(pf.act(PfHistory(3, pf_obs(rng))), 0.0);
}

TEST(Actor, DeterministicAndBounded) {
  Rng rng(13);
  LppActor actor(rng);
  LppHistory h = lpp_history(rng, {4, 4, 4});
  const double a0 = actor.act(h);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(actor.act(h), a0);
  for (auto& o : h) o.targets.insert(o.targets.begin(), o.targets.front());
  const double a1 = actor.act(h);
  EXPECT_TRUE(std::isfinite(a1));
  EXPECT_LE(std::abs(a1), 1.0);
  for (int i = 0; i < 200; ++i) {
    for (auto* t : actor.params()) fill_uniform(t->value, 3.0, rng);
    const double a = actor.act(lpp_history(rng, {1 + i % 5, 1 + i % 3, 1}));
    ASSERT_LE(std::abs(a), 1.0);
  }
}

TEST(Actor, HistoryLengthMismatchIsStructural) {
  Rng rng(14);
  LppActor actor(rng);
  EXPECT_THROW(actor.act(lpp_history(rng, {1, 1})), StructuralError);
  Dense d("d", 3, 2, rng);
  EXPECT_THROW(d.forward(Mat::Zero(1, 4)), StructuralError);
}

TEST(Replay, HistoriesNeverCrossEpisodes) {
  ReplayBuffer<PfObservation> buf(37, 2);
  Rng rng(15);
  int episode = 0, step = 0;
  const auto obs = [](int e, int s) {
    PfObservation o{};
    o[0] = e;
    o[1] = s;
    return o;
  };
  for (int i = 0; i < 200; ++i) {
    const bool start = step == 0;
    buf.add(obs(episode, step), 0.0, 0.0, obs(episode, step + 1), false, start);
    ++step;
    if (rng.bernoulli(0.3)) {
      ++episode;
      step = 0;
    }
    for (std::size_t k = 0; k < buf.sampleable(); ++k) {
      const auto s = buf.at(k);
      const int e = static_cast<int>(s.history.back()[0]);
      const int t = static_cast<int>(s.history.back()[1]);
      for (int l = 0; l < 3; ++l) {
        ASSERT_EQ(s.history[static_cast<std::size_t>(l)][0], e);
        ASSERT_EQ(s.history[static_cast<std::size_t>(l)][1], std::max(0, t - (2 - l)));
        ASSERT_EQ(s.next_history[static_cast<std::size_t>(l)][0], e);
      }
      ASSERT_EQ(s.next_history.back()[1], t + 1);
    }
  }
  EXPECT_EQ(buf.size(), 37u);
  EXPECT_EQ(buf.sampleable(), 35u);
}

TEST(Replay, DefaultsMatchTable) {
  const Td3Config c;
  EXPECT_EQ(c.capacity, 500000u);
  EXPECT_EQ(c.min_fill, 5000u);
  EXPECT_EQ(c.batch, 32);
  EXPECT_EQ(c.policy_delay, 2);
  EXPECT_DOUBLE_EQ(c.gamma, 0.99);
  EXPECT_DOUBLE_EQ(c.tau, 0.001);
  EXPECT_DOUBLE_EQ(c.lr_actor, 1e-4);
  EXPECT_DOUBLE_EQ(c.lr_critic, 1e-4);
  EXPECT_DOUBLE_EQ(c.target_noise, 0.2);
  EXPECT_DOUBLE_EQ(c.noise_clip, 0.5);
}

namespace {

template <class Spec>
std::vector<Mat> snapshot(Td3Agent<Spec>& a) {
  std::vector<Mat> out;
  for (auto& [name, ps] : a.networks())
    for (auto* t : ps) out.push_back(t->value);
  return out;
}

void fill_pf(Td3Agent<PfSpec>& ag, int n, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < n; ++i) ag.buffer().add(pf_obs(rng), rng.uniform(-1, 1), rng.uniform(-1, 1), pf_obs(rng), i % 13 == 12, i % 13 == 0);
}

}  // namespace

TEST(Td3, TargetsEqualMainAfterInit) {
  Td3Agent<PfSpec> ag({}, 1);
  const auto a = ag.actor().params(), at = ag.actor_target().params();
  const auto q = ag.critic2().params(), qt = ag.critic2_target().params();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k]->value, at[k]->value);
  for (std::size_t k = 0; k < q.size(); ++k) EXPECT_EQ(q[k]->value, qt[k]->value);
  EXPECT_NE(ag.critic1().params()[0]->value, ag.critic2().params()[0]->value);
}

TEST(Td3, UpdateBeforeMinFillIsPrecondition) {
  Td3Config c;
  c.min_fill = 50;
  Td3Agent<PfSpec> ag(c, 2);
  fill_pf(ag, 49, 3);
  EXPECT_THROW(ag.update(), PreconditionError);
  fill_pf(ag, 1, 4);
  EXPECT_NO_THROW(ag.update());
}

TEST(Td3, ZeroLearningRateLeavesParametersUnchanged) {
  Td3Config c;
  c.min_fill = 40;
  c.lr_actor = 0.0;
  c.lr_critic = 0.0;
  c.tau = 0.0;
  Td3Agent<PfSpec> ag(c, 5);
  fill_pf(ag, 60, 6);
  const auto before = snapshot(ag);
  for (int i = 0; i < 4; ++i) ag.update();
  EXPECT_EQ(snapshot(ag), before);
}

TEST(Td3, SoftUpdateWithUnitRateCopies) {
  Td3Config c;
  c.min_fill = 40;
  c.tau = 1.0;
  c.policy_delay = 1;
  Td3Agent<PfSpec> ag(c, 7);
  fill_pf(ag, 60, 8);
  ag.update();
  const auto a = ag.actor().params(), at = ag.actor_target().params();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k]->value, at[k]->value);
  const auto q = ag.critic1().params(), qt = ag.critic1_target().params();
  for (std::size_t k = 0; k < q.size(); ++k) EXPECT_EQ(q[k]->value, qt[k]->value);
}

TEST(Td3, ZeroDiscountTargetIsReward) {
  Td3Config c;
  c.min_fill = 1;
  c.gamma = 0.0;
  c.batch = 4;
  Td3Agent<PfSpec> ag(c, 9);
  Rng rng(10);
  ag.buffer().add(pf_obs(rng), 0.3, 0.123456789, pf_obs(rng), false, true);
  ag.update();
  for (Eigen::Index i = 0; i < ag.last_targets().rows(); ++i) EXPECT_EQ(ag.last_targets()(i, 0), 0.123456789);
}

TEST(Td3, TerminalMasksBootstrap) {
  Td3Config c;
  c.min_fill = 1;
  c.batch = 2;
  Td3Agent<PfSpec> ag(c, 11);
  Rng rng(12);
  ag.buffer().add(pf_obs(rng), 0.1, -2.5, pf_obs(rng), true, true);
  ag.update();
  EXPECT_EQ(ag.last_targets()(0, 0), -2.5);
}

TEST(Td3, UpdatesAreBitReproducible) {
  Td3Config c;
  c.min_fill = 40;
  Td3Agent<PfSpec> a(c, 13), b(c, 13);
  fill_pf(a, 80, 14);
  fill_pf(b, 80, 14);
  for (int i = 0; i < 5; ++i) {
    const auto sa = a.update(), sb = b.update();
    ASSERT_EQ(sa.critic_loss, sb.critic_loss);
  }
  EXPECT_EQ(snapshot(a), snapshot(b));
}

TEST(Td3, LppUpdateRuns) {
  Td3Config c;
  c.min_fill = 20;
  c.batch = 8;
  Td3Agent<LppSpec> ag(c, 15);
  Rng rng(16);
  for (int i = 0; i < 30; ++i)
    ag.buffer().add(lpp_obs(rng, 1 + i % 4), rng.uniform(-1, 1), rng.uniform(-1, 1), lpp_obs(rng, 1 + i % 3), false, i % 10 == 0);
  const auto before = snapshot(ag);
  for (int i = 0; i < 2; ++i) EXPECT_TRUE(std::isfinite(ag.update().critic_loss));
  EXPECT_NE(snapshot(ag), before);
}

TEST(Weights, RoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "asv_weights_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "w.asvw").string();
  Td3Agent<PfSpec> a({}, 17), b({}, 18);
  save_weights(path, a.networks(), {{"kind", "pf"}});
  load_weights(path, b.networks());
  EXPECT_EQ(snapshot(a), snapshot(b));
  std::ifstream js(path + ".json");
  const auto manifest = nlohmann::json::parse(js);
  EXPECT_EQ(manifest["format"], "ASVW");
  EXPECT_EQ(manifest["meta"]["kind"], "pf");

  Td3Agent<LppSpec> lpp({}, 19);
  EXPECT_THROW(load_weights(path, lpp.networks()), StructuralError);
  {
    std::ofstream bad(dir / "bad.asvw", std::ios::binary);
    bad << "NOPE";
  }
  EXPECT_THROW(read_weights((dir / "bad.asvw").string()), FormatError);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(read_weights(path), FormatError);
}

TEST(Train, ShortRunIsPureExploration) {
  Td3Config c;
  c.min_fill = 5000;
  Td3Agent<PfSpec> ag(c, 20);
  PfStraightEnv env, ev;
  TrainConfig tc;
  tc.total_steps = 600;
  tc.eval_every = 300;
  tc.eval_episodes = 1;
  const auto res = train(ag, env, ev, tc);
  EXPECT_EQ(res.updates, 0);
  EXPECT_EQ(res.curve.size(), 2u);
  EXPECT_EQ(ag.buffer().size(), 600u);
}

TEST(Train, FixedSeedGivesIdenticalCurves) {
  Td3Config c;
  c.min_fill = 100;
  c.batch = 8;
  const auto run = [&] {
    Td3Agent<PfSpec> ag(c, 21);
    PfStraightEnv env, ev;
    TrainConfig tc;
    tc.seed = 21;
    tc.total_steps = 300;
    tc.eval_every = 100;
    tc.eval_episodes = 1;
    return train(ag, env, ev, tc);
  };
  const auto r1 = run(), r2 = run();
  ASSERT_EQ(r1.curve.size(), 3u);
  EXPECT_EQ(r1.updates, 201);
  for (std::size_t i = 0; i < r1.curve.size(); ++i) {
    EXPECT_EQ(r1.curve[i].ret, r2.curve[i].ret);
    EXPECT_EQ(r1.curve[i].smoothed, r2.curve[i].smoothed);
  }
  EXPECT_DOUBLE_EQ(r1.curve[1].smoothed, 0.8 * r1.curve[0].smoothed + 0.2 * r1.curve[1].ret);
}

TEST(Train, WritesCheckpointAndCurve) {
  const auto dir = std::filesystem::temp_directory_path() / "asv_train_test";
  std::filesystem::remove_all(dir);
  Td3Config c;
  c.min_fill = 50;
  c.batch = 4;
  Td3Agent<PfSpec> ag(c, 22);
  PfStraightEnv env, ev;
  TrainConfig tc;
  tc.total_steps = 100;
  tc.eval_every = 50;
  tc.eval_episodes = 1;
  tc.out_dir = dir.string();
  train(ag, env, ev, tc);
  EXPECT_TRUE(std::filesystem::exists(dir / "agent.asvw"));
  std::ifstream csv(dir / "learning_curve.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "step,return,smoothed");
}
