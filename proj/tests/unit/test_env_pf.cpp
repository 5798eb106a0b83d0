#include <gtest/gtest.h>

#include "asv/env/pf.hpp"

using namespace asv;

namespace {

std::shared_ptr<const Waterway> straight(double depth = 30.0) {
  return std::make_shared<const Waterway>(make_waterway(Path({{0, 0}, {15000, 0}}), depth, 3));
}

VesselState at(double n, double e, double psi = 0.0, double u = 3.0) {
  VesselState s;
  s.x_n = n;
  s.y_n = e;
  s.psi = psi;
  s.u = u;
  return s;
}

}  // namespace

TEST(PfReward, PerfectTrackingIsTwoThirds) { EXPECT_NEAR(pf_reward(0, 0, 0).total, 2.0 / 3.0, 1e-12); }

TEST(PfReward, TurnPenaltyBoundaryInclusive) {
  const auto r = pf_reward(10.0, kPi / 2, 0.5);
  EXPECT_EQ(r.chi, -10.0);
  EXPECT_NEAR(r.total, (std::exp(-0.5) - 10.0 - 0.25) / 3.0, 1e-12);
  EXPECT_EQ(pf_reward(0, -kPi / 2, 0).chi, -10.0);
  EXPECT_GT(pf_reward(0, std::nextafter(kPi / 2, 0.0), 0).chi, 0.0);
}

TEST(PfReward, CrossTrackPlugIn) {
  EXPECT_NEAR(pf_reward(20.0, 0.0, 1.0).total, std::exp(-1.0) / 3.0, 1e-12);
  EXPECT_NEAR(pf_reward(20.0, 0.0, 1.0).total, 0.1226, 5e-5);
}

TEST(PfReward, BoundedForAllInputs) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double r = pf_reward(rng.uniform(-1000, 1000), rng.uniform(-10, 10), rng.uniform(-1, 1)).total;
    ASSERT_GE(r, -10.0 / 3.0 - 1.0 / 3.0);
    ASSERT_LE(r, 1.0);
  }
}

TEST(PfAction, RudderLimitsHoldForAnySequence) {
  Rng rng(2);
  double d = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double a = i % 7 == 0 ? rng.uniform(-5, 5) : rng.uniform(-1, 1);
    const double n = next_rudder(d, a);
    ASSERT_LE(std::abs(n), deg2rad(20.0) + 1e-15);
    ASSERT_LE(std::abs(n - d), deg2rad(5.0) + 1e-15);
    d = n;
  }
  EXPECT_DOUBLE_EQ(next_rudder(deg2rad(18.0), 1.0), deg2rad(20.0));
}

TEST(Disturbances, SupportsAndDeterminism) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const EnvDisturbance e = sample_disturbances(rng);
    ASSERT_GE(e.current_speed, 0.0);
    ASSERT_LE(e.current_speed, 0.5);
    ASSERT_GE(e.wind_speed, 0.0);
    ASSERT_LE(e.wind_speed, 15.0);
    ASSERT_GE(e.wave_amplitude, 0.01);
    ASSERT_LE(e.wave_amplitude, 2.0);
    ASSERT_GE(e.wave_length, 1.0);
    ASSERT_LE(e.wave_length, 100.0);
    ASSERT_GE(e.wave_period, 0.5);
    ASSERT_LE(e.wave_period, 7.0);
    for (double a : {e.current_angle, e.wind_angle, e.wave_angle}) {
      ASSERT_GE(a, 0.0);
      ASSERT_LT(a, kTwoPi);
    }
  }
  EXPECT_EQ(sample_disturbances(std::uint64_t{9}), sample_disturbances(std::uint64_t{9}));
}

TEST(PfObservation, LayoutAndScaling) {
  VesselState s = at(0, 0, 0.5, 2.4);
  s.v = 0.1;
  s.r = 0.001;
  s.delta = deg2rad(10.0);
  EnvDisturbance e;
  e.current_speed = 0.25;
  e.current_angle = 0.5 + kPi / 2;
  e.wind_speed = 7.5;
  e.wind_angle = 0.5;
  e.wave_angle = 0.5 - kPi / 2;
  e.wave_amplitude = 1.0;
  e.wave_period = 3.5;
  e.wave_length = 50.0;
  e.depth = 25.0;
  const PfObservation o = build_pf_observation(s, 4e-5, 32.0, kPi / 4, e, PfConfig{});
  const PfObservation expect{0.8, 0.5, 0.5, 0.5, 0.5, 0.5, 0.25, 0.5, 0.5, 0.5, 0.0, -0.5, 0.5, 0.5, 0.5, 0.25};
  for (int i = 0; i < kPfObsDim; ++i) EXPECT_NEAR(o[i], expect[i], 1e-12) << i;
}

TEST(PfObservation, NoiseIsZeroMean) {
  const PfConfig cfg;
  EnvDisturbance e;
  e.current_speed = 0.3;
  e.wind_speed = 5.0;
  e.wave_amplitude = 0.5;
  e.wave_period = 3.0;
  e.wave_length = 40.0;
  e.depth = 30.0;
  Rng rng(4);
  const int n = 100000;
  double sc = 0, sw = 0, sa = 0, sd = 0;
  for (int i = 0; i < n; ++i) {
    const EnvDisturbance r = noisy_reading(e, rng, cfg);
    sc += r.current_speed - e.current_speed;
    sw += r.wind_speed - e.wind_speed;
    sa += r.wave_amplitude - e.wave_amplitude;
    sd += r.depth - e.depth;
  }
  const double k = 3.0 / std::sqrt(double(n));
  EXPECT_LT(std::abs(sc / n), k * 0.02 * 0.5);
  EXPECT_LT(std::abs(sw / n), k * 0.02 * 15.0);
  EXPECT_LT(std::abs(sa / n), k * 0.02 * 2.0);
  EXPECT_LT(std::abs(sd / n), k * 0.02 * 100.0);
}

TEST(PfEnv, DeterministicTrace) {
  PfEnv a, b;
  a.reset(21);
  b.reset(21);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double act = rng.uniform(-1, 1);
    const auto ra = a.step(act), rb = b.step(act);
    ASSERT_EQ(ra.observation, rb.observation);
    ASSERT_EQ(ra.reward, rb.reward);
    ASSERT_EQ(a.state(), b.state());
    if (ra.done) break;
  }
}

TEST(PfEnv, TruncatesAtMaxSteps) {
  PfConfig cfg;
  cfg.disturbances = false;
  PfEnv env(cfg);
  env.reset_to(straight(), Path({{0, 0}, {15000, 0}}), at(100, 0), {}, 1, 500);
  int n = 0;
  PfStepResult r;
  do {
    r = env.step(0.0);
    ++n;
  } while (!r.done);
  EXPECT_EQ(n, 500);
  EXPECT_TRUE(r.info.truncated);
  EXPECT_LT(std::abs(r.info.y_e), 1.0);
}

TEST(PfEnv, OffPathTerminates) {
  PfEnv env;
  auto w = std::make_shared<const Waterway>(make_waterway(Path({{0, 0}, {15000, 0}}), 30.0, 3,
                                                          WaterwayConfig{.half_width = 2000.0}));
  env.reset_to(w, Path({{0, 0}, {15000, 0}}), at(100, 401), {}, 1, 500);
  const auto r = env.step(0.0);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.info.off_path);
  EXPECT_FALSE(r.info.infeasible);
}

TEST(PfEnv, InsufficientDepthTerminates) {
  PfEnv env;
  env.reset_to(straight(30.0), Path({{0, 0}, {15000, 0}}), at(100, 300), {}, 1, 500);
  const auto r = env.step(0.0);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.info.infeasible);
}

TEST(PfEnv, ScheduleOverridesConditions) {
  PfConfig cfg;
  cfg.disturbances = false;
  PfEnv env(cfg);
  env.set_schedule([](int step, const VesselState&, const EnvDisturbance& base) {
    EnvDisturbance e = base;
    if (step >= 5) {
      e.current_speed = 0.5;
      e.current_angle = kPi / 2;
    }
    return e;
  });
  env.reset_to(straight(), Path({{0, 0}, {15000, 0}}), at(100, 0), {}, 1, 500);
  for (int i = 0; i < 5; ++i) env.step(0.0);
  EXPECT_NEAR(env.state().y_n, 0.0, 1e-9);
  for (int i = 0; i < 5; ++i) env.step(0.0);
  EXPECT_GT(env.state().y_n, 1.0);
}

TEST(PfEnv, RudderInvariantUnderRandomActions) {
  PfEnv env;
  env.reset(8);
  Rng rng(9);
  double prev = env.state().delta;
  for (int i = 0; i < 300; ++i) {
    const auto r = env.step(rng.uniform(-1, 1));
    ASSERT_LE(std::abs(env.state().delta), deg2rad(20.0) + 1e-15);
    ASSERT_LE(std::abs(env.state().delta - prev), deg2rad(5.0) + 1e-15);
    prev = env.state().delta;
    for (int k : {6, 8, 10, 11}) {
      ASSERT_GE(r.observation.back()[k], -1.0);
      ASSERT_LE(r.observation.back()[k], 1.0);
    }
    if (r.done) break;
  }
}
