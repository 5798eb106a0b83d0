#include <gtest/gtest.h>

#include "asv/env/lpp.hpp"

using namespace asv;

namespace {

const LppConfig kCfg{};

Waterway open_water() {
  Waterway w;
  w.global = Path({{-5000, 0}, {5000, 0}});
  w.reversed = Path({{5000, -20000}, {-5000, -20000}});
  w.raster = DepthRaster(20.0, -6000.0, -6000.0, 600, 600);
  for (std::uint32_t i = 0; i < 600; ++i)
    for (std::uint32_t j = 0; j < 600; ++j) w.raster.depth(i, j) = 50.0;
  w.max_depth = 50.0;
  return w;
}

TrafficVessel target_at(Vec2 p, double psi, double speed) {
  TrafficVessel t;
  t.state = kinematic_state(p, psi, speed);
  t.speed = speed;
  return t;
}

KinematicShip own_north(double speed = 3.0) { return {kinematic_state({0, 0}, 0.0, speed), speed}; }

}  // namespace

TEST(LppObservation, NoTrafficGivesNoRiskShip) {
  const Waterway w = open_water();
  const auto o = build_lpp_observation(own_north(), track_errors(w.global, {0, 0}, 0), {}, w, kCfg);
  ASSERT_EQ(o.targets.size(), 1u);
  EXPECT_EQ(o.targets[0], kNoRiskShip);
}

TEST(LppObservation, OpenWaterWaterwayBlockIsZero) {
  const Waterway w = open_water();
  const auto o = build_lpp_observation(own_north(), track_errors(w.global, {0, 0}, 0), {}, w, kCfg);
  for (double v : o.waterway) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(o.own[0], 1.0);
  EXPECT_EQ(o.own[1], 0.0);
  EXPECT_EQ(o.own[2], 0.0);
  EXPECT_EQ(o.own[3], 0.0);
}

TEST(LppObservation, TargetsSortedByDescendingDistanceAndRangeLimited) {
  const Waterway w = open_water();
  const std::vector<TrafficVessel> ts{target_at({100, 0}, 0.0, 2.0), target_at({400, 0}, 0.0, 2.5),
                                      target_at({1000, 0}, 0.0, 2.5)};
  const auto o = build_lpp_observation(own_north(), track_errors(w.global, {0, 0}, 0), ts, w, kCfg);
  ASSERT_EQ(o.targets.size(), 2u);
  EXPECT_DOUBLE_EQ(o.targets[0][0], (400.0 - 96.0) / 926.0);
  EXPECT_DOUBLE_EQ(o.targets[1][0], (100.0 - 96.0) / 926.0);
  EXPECT_DOUBLE_EQ(o.targets[0][3], -0.5 / 3.0);
  EXPECT_EQ(o.targets[0][4], 1.0);
}

TEST(LppObservation, TargetFeatureOracle) {
  // oncoming ship 600 m ahead, 30 m to starboard
  const VesselState own = kinematic_state({0, 0}, 0.0, 3.0);
  const VesselState ts = kinematic_state({600, 30}, kPi, 2.0);
  const auto f = lpp_target_features(own, 3.0, ts, 2.0, 0.0, kCfg);
  const double alpha = std::atan2(30.0, 600.0);
  const ShipDomain dom{};
  EXPECT_NEAR(f[0], (std::hypot(600.0, 30.0) - dom.radius(alpha)) / 926.0, 1e-12);
  EXPECT_NEAR(f[1], alpha / kPi, 1e-12);
  EXPECT_NEAR(f[2], -1.0, 1e-12);
  EXPECT_EQ(f[4], -1.0);
  EXPECT_NEAR(f[5], 120.0 / 300.0, 1e-12);
  // at CPA the target is abeam at 30 m: d* = 30 − side radius
  EXPECT_NEAR(f[6], (30.0 - dom.side()) / 463.0, 1e-9);
}

TEST(LppObservation, EntriesStayInRangeOnRandomStates) {
  const Waterway w = generate_waterway(5);
  Rng rng(6);
  for (int i = 0; i < 100000; ++i) {
    const double s = rng.uniform(100.0, w.global.total_length() - 100.0);
    const double chi = w.global.course_at(s);
    const Vec2 p = w.global.point_at(s) + rng.uniform(-400.0, 400.0) * Vec2{-std::sin(chi), std::cos(chi)};
    KinematicShip own{kinematic_state(p, rng.uniform(0.0, kTwoPi), rng.uniform(2.4, 3.6)), 0.0};
    own.speed = own.state.u;
    std::vector<TrafficVessel> ts;
    if (i % 10 == 0) {
      const int n = rng.uniform_int(0, 4);
      for (int j = 0; j < n; ++j)
        ts.push_back(target_at(p + Vec2{rng.uniform(-900, 900), rng.uniform(-900, 900)}, rng.uniform(0, kTwoPi),
                               rng.uniform(0.5, 4.5)));
    }
    const auto e = track_errors(w.global, p, w.global.segment_at(s));
    const auto o = build_lpp_observation(own, e, ts, w, kCfg);
    for (double v : o.waterway) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    for (int k = 1; k <= 2; ++k) {
      ASSERT_GE(o.own[k], -1.0);
      ASSERT_LE(o.own[k], 1.0);
    }
    for (const auto& t : o.targets) {
      ASSERT_GE(t[1], -1.0);
      ASSERT_LE(t[1], 1.0);
      ASSERT_GE(t[2], -1.0);
      ASSERT_LE(t[2], 1.0);
      ASSERT_TRUE(t[4] == 1.0 || t[4] == -1.0);
      ASSERT_GE(t[6], 0.0);
    }
  }
}

TEST(LppReward, PerfectTrackingIsFiveNineteenths) {
  EXPECT_NEAR(lpp_reward(0, 0, 0, 0, 0, kCfg).total, 5.0 / 19.0, 1e-12);
}

TEST(LppReward, CollisionComposition) {
  EXPECT_NEAR(lpp_reward(0, 0, -11.0, 0, 0, kCfg).total, -61.0 / 19.0, 1e-12);
}

TEST(LppReward, CrossTrackPlugIn) {
  const auto r = lpp_reward(128.0, 0, 0, 0, 0, kCfg);
  EXPECT_NEAR(r.total, 4.0 / 19.0 * std::exp(-2.0) + 1.0 / 19.0, 1e-12);
  EXPECT_NEAR(r.total, 0.0811, 5e-5);
}

TEST(LppReward, ComponentsMonotoneAndBounded) {
  double prev_y = 2.0, prev_c = 2.0;
  for (double x = 0.0; x < 3.0; x += 0.01) {
    const auto r = lpp_reward(x * 100.0, x, 0, 0, std::min(1.0, x), kCfg);
    EXPECT_LT(r.ye, prev_y);
    EXPECT_LT(r.chi, prev_c);
    EXPECT_GT(r.ye, 0.0);
    EXPECT_LE(r.ye, 1.0);
    EXPECT_LE(r.comf, 0.0);
    EXPECT_GE(r.comf, -1.0);
    prev_y = r.ye;
    prev_c = r.chi;
  }
  EXPECT_NEAR(kCfg.w_ye + kCfg.w_chi + kCfg.w_coll + kCfg.w_rule + kCfg.w_comf, 1.0, 1e-15);
}

TEST(LppCollision, ContactGivesMinusEleven) {
  const VesselState own = kinematic_state({0, 0}, 0.0, 3.0);
  const std::vector<TrafficVessel> ts{target_at({96.0, 0.0}, 0.0, 2.0)};
  LppFlags f;
  f.collisions = is_collision(own, ts[0].state, kCfg.domain()) ? 1 : 0;
  ASSERT_EQ(f.collisions, 1);
  EXPECT_NEAR(lpp_collision_reward(own, ts, f, kCfg), -11.0, 1e-12);
}

TEST(LppCollision, AbeamAtThreeBeams) {
  const VesselState own = kinematic_state({0, 0}, 0.0, 3.0);
  const double d = kCfg.domain().side() + 3.0 * kCfg.beam;
  const std::vector<TrafficVessel> ts{target_at({0.0, d}, 0.0, 3.0)};
  EXPECT_FALSE(is_collision(own, ts[0].state, kCfg.domain()));
  EXPECT_NEAR(lpp_collision_reward(own, ts, {}, kCfg), -std::exp(-1.0), 1e-12);
}

TEST(LppCollision, EmptyTrafficIsZeroAndFlagsCount) {
  const VesselState own = kinematic_state({0, 0}, 0.0, 3.0);
  EXPECT_EQ(lpp_collision_reward(own, {}, {}, kCfg), 0.0);
  EXPECT_EQ(lpp_collision_reward(own, {}, {true, true, 0}, kCfg), -20.0);
}

TEST(LppCollision, ProximityEllipseSymmetry) {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(0, kTwoPi), d = rng.uniform(-200, 400);
    const double f = lpp_proximity(a, d, 34.8, 64.0);
    ASSERT_NEAR(f, lpp_proximity(-a, d, 34.8, 64.0), 1e-15);
    ASSERT_NEAR(f, lpp_proximity(kPi - a, d, 34.8, 64.0), 1e-15);
  }
}

TEST(LppRule, RangeIsRhombus) {
  EXPECT_DOUBLE_EQ(lpp_rule_range(0.0, 926, 463), 926.0);
  EXPECT_DOUBLE_EQ(lpp_rule_range(kPi / 2, 926, 463), 463.0);
  EXPECT_DOUBLE_EQ(lpp_rule_range(kPi, 926, 463), 926.0);
  // midpoint of the corner edge
  const double x = 463.0, y = 231.5;
  EXPECT_NEAR(lpp_rule_range(std::atan2(y, x), 926, 463), std::hypot(x, y), 1e-9);
}

TEST(LppRule, NoSameDirectionTrafficIsZero) {
  const VesselState own = kinematic_state({0, 0}, 0.0, 3.0);
  const std::vector<TrafficVessel> ts{target_at({200, -50}, kPi, 1.0)};
  EXPECT_EQ(lpp_rule_reward(own, 3.0, ts, kCfg), 0.0);
  EXPECT_EQ(lpp_rule_reward(own, 3.0, {}, kCfg), 0.0);
}

TEST(LppRule, FasterOwnOnTargetsStarboardQuarter) {
  // target heading north at origin, own ship 100 m away at bearing 135° from the target
  const TrafficVessel t = target_at({0, 0}, 0.0, 2.0);
  const Vec2 p = 100.0 * heading_vector(deg2rad(135.0));
  const VesselState own = kinematic_state(p, 0.0, 3.0);
  EXPECT_NEAR(relative_bearing(t.state, p), 0.75 * kPi, 1e-12);
  EXPECT_EQ(lpp_rule_reward(own, 3.0, {t}, kCfg), -2.0);
  EXPECT_EQ(lpp_rule_reward(own, 1.5, {t}, kCfg), 0.0);
}

TEST(LppRule, BlockingFasterOvertaker) {
  const TrafficVessel t = target_at({0, 0}, 0.0, 4.0);
  const Vec2 p = 100.0 * heading_vector(deg2rad(315.0));
  const VesselState own = kinematic_state(p, 0.0, 3.0);
  EXPECT_EQ(lpp_rule_reward(own, 3.0, {t}, kCfg), -2.0);
  // a slower same-direction ship elsewhere clears σ_spd
  const TrafficVessel slow = target_at({-3000, 0}, 0.0, 1.0);
  EXPECT_EQ(lpp_rule_reward(own, 3.0, {t, slow}, kCfg), 0.0);
}

TEST(LppRule, GuardTruthTable) {
  const TrafficVessel t = target_at({0, 0}, 0.0, 2.0);
  struct Row {
    double bearing_deg, dist, own_speed;
    int expected;
  };
  const Row rows[] = {{90, 100, 3, 1},   {180, 100, 3, 1},  {89, 100, 3, 0},  {181, 100, 3, 0},
                      {135, 500, 3, 0},  {135, 300, 3, 1},  {270, 100, 1, 1}, {359, 100, 1, 1},
                      {269, 100, 1, 0},  {0, 100, 1, 0},    {315, 100, 3, 0}, {180, 925.9, 3, 1},
                      {180, 927, 3, 0}};
  for (const Row& r : rows) {
    const Vec2 p = r.dist * heading_vector(deg2rad(r.bearing_deg));
    const VesselState own = kinematic_state(p, 0.0, r.own_speed);
    EXPECT_EQ(lpp_rule_violations(own, r.own_speed, {t}, kCfg), r.expected) << r.bearing_deg << " " << r.dist;
  }
}

TEST(LppEnv, DeterministicTrace) {
  LppEnv a, b;
  a.reset(77);
  b.reset(77);
  Rng rng(3);
  for (int i = 0; i < 150; ++i) {
    const double act = rng.uniform(-1, 1);
    const auto ra = a.step(act), rb = b.step(act);
    ASSERT_EQ(ra.reward, rb.reward);
    ASSERT_EQ(ra.observation, rb.observation);
    ASSERT_EQ(a.own().state, b.own().state);
    if (ra.done) break;
  }
}

TEST(LppEnv, EndsAtMaxStepsAndHoldsHeading) {
  LppEnv env;
  auto h = env.reset(5);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0], h[2]);
  int steps = 0;
  double psi = env.own().state.psi;
  for (;;) {
    const bool apply = env.step_count() % 4 == 0;
    const auto r = env.step(0.3);
    ++steps;
    if (apply) {
      EXPECT_NEAR(std::abs(wrap_pi(env.own().state.psi - psi)), deg2rad(3.0), 1e-12);
      EXPECT_EQ(r.info.applied_action, 0.3);
    } else {
      EXPECT_EQ(env.own().state.psi, psi);
      EXPECT_EQ(r.info.applied_action, 0.0);
      EXPECT_EQ(r.info.reward.comf, -0.0);
    }
    psi = env.own().state.psi;
    if (r.done) {
      EXPECT_TRUE(r.info.truncated || r.info.off_path);
      break;
    }
  }
  EXPECT_LE(steps, 150);
}

TEST(LppEnv, StraightRunTruncatesAt150) {
  LppEnv env;
  auto w = std::make_shared<const Waterway>(make_waterway(Path({{0, 0}, {30000, 0}}), 30.0, 1));
  env.reset_to(w, {kinematic_state({2000, 0}, 0.0, 3.0), 3.0}, {}, 150);
  int n = 0;
  LppStepResult r;
  do {
    r = env.step(0.0);
    ++n;
    EXPECT_NEAR(r.reward, 5.0 / 19.0, 1e-12);
  } while (!r.done);
  EXPECT_EQ(n, 150);
  EXPECT_TRUE(r.info.truncated);
}

TEST(LppEnv, FarOffPathTerminates) {
  LppEnv env;
  auto w = std::make_shared<const Waterway>(make_waterway(Path({{0, 0}, {30000, 0}}), 30.0, 1));
  env.reset_to(w, {kinematic_state({2000, 0.51 * 1852}, 0.0, 3.0), 3.0}, {}, 150);
  const auto r = env.step(0.0);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.info.off_path);
  EXPECT_FALSE(r.info.truncated);
  EXPECT_TRUE(r.info.flags.ground);
}

TEST(LppEnv, RewardLowerBoundHolds) {
  LppEnv env;
  Rng rng(12);
  for (int ep = 0; ep < 20; ++ep) {
    env.reset(1000 + ep);
    for (;;) {
      const auto r = env.step(rng.uniform(-1, 1));
      const double n = static_cast<double>(env.traffic().size());
      const double bound = 6.0 / 19.0 * (-10.0 * (2.0 + n) - 1.0) + 6.0 / 19.0 * (-2.0 * n) - 2.0 / 19.0;
      ASSERT_GE(r.reward, bound);
      if (r.done) break;
    }
  }
}

TEST(LppEnv, LaneCrossingFlag) {
  LppEnv env;
  auto w = std::make_shared<const Waterway>(make_waterway(Path({{0, 0}, {30000, 0}}), 30.0, 1));
  env.reset_to(w, {kinematic_state({2000, -230}, 0.0, 3.0), 3.0}, {}, 150);
  const auto r = env.step(0.0);
  EXPECT_TRUE(r.info.flags.lane);
  EXPECT_FALSE(r.info.flags.ground);
  EXPECT_NEAR(r.info.reward.coll, -10.0, 1e-12);
}
