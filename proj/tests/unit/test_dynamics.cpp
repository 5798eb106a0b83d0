#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "asv/core/angles.hpp"
#include "asv/dynamics/model.hpp"
#include "asv/dynamics/params.hpp"

using namespace asv;

namespace {

VesselParams symmetric_params() {
  VesselParams p = default_vessel_params();
  return p;
}

// Residual of the three coupled equations of motion, evaluated independently of the solver.
std::array<double, 3> eom_lhs(const VesselState& s, const VesselParams& p, const Accelerations& a) {
  const double m = p.mass;
  const double lx = (m + p.added_mass_x) * a.u_dot - (m + p.added_mass_y) * s.v * s.r - p.x_g * m * s.r * s.r;
  const double ly = (m + p.added_mass_y) * a.v_dot + (m + p.added_mass_x) * s.u * s.r + p.x_g * m * a.r_dot;
  const double ln = (p.inertia_z + p.x_g * p.x_g * m + p.added_inertia_z) * a.r_dot + p.x_g * m * (a.v_dot + s.u * s.r);
  return {lx, ly, ln};
}

}  // namespace

TEST(Forces, ZeroExcitationGivesZeroComponents) {
  const VesselParams p = default_vessel_params();
  const ForceSet f = compute_forces(VesselState{}, p, EnvDisturbance{}, 0.0);
  for (const ForceComponent* c : {&f.hull, &f.rudder, &f.propeller, &f.wind, &f.wave}) {
    EXPECT_EQ(c->x, 0.0);
    EXPECT_EQ(c->y, 0.0);
    EXPECT_EQ(c->n, 0.0);
  }
  EXPECT_EQ(f.x, 0.0);
  EXPECT_EQ(f.y, 0.0);
  EXPECT_EQ(f.n, 0.0);
}

TEST(Forces, RudderSwayForceIsOddInRudderAngle) {
  const VesselParams p = symmetric_params();
  VesselState s;
  s.u = 3.0;
  s.delta = deg2rad(10.0);
  const double plus = compute_forces(s, p, EnvDisturbance{}, 200.0).rudder.y;
  s.delta = -deg2rad(10.0);
  const double minus = compute_forces(s, p, EnvDisturbance{}, 200.0).rudder.y;
  EXPECT_NE(plus, 0.0);
  EXPECT_EQ(plus, -minus);
}

TEST(Forces, WindScalesWithSpeedSquared) {
  VesselParams p = default_vessel_params();
  EnvDisturbance env;
  env.wind_angle = deg2rad(130.0);
  env.wind_speed = 6.0;
  const ForceSet f1 = compute_forces(VesselState{}, p, env, 0.0);
  env.wind_speed = 12.0;
  const ForceSet f2 = compute_forces(VesselState{}, p, env, 0.0);
  EXPECT_NEAR(f2.wind.x / f1.wind.x, 4.0, 4e-9);
  EXPECT_NEAR(f2.wind.y / f1.wind.y, 4.0, 4e-9);
  EXPECT_NEAR(f2.wind.n / f1.wind.n, 4.0, 4e-9);
}

TEST(Forces, ComponentSumUsesFixedOrder) {
  const VesselParams p = default_vessel_params();
  VesselState s{10.0, -4.0, 0.3, 2.7, 0.15, 0.004, 0.1};
  EnvDisturbance env{0.3, 1.0, 9.0, 2.0, 0.7, 4.0, 5.0, 40.0, 30.0};
  const ForceSet f = compute_forces(s, p, env, 200.0);
  EXPECT_EQ(f.x, f.hull.x + f.rudder.x + f.propeller.x + f.wind.x + f.wave.x);
  EXPECT_EQ(f.y, f.hull.y + f.rudder.y + f.propeller.y + f.wind.y + f.wave.y);
  EXPECT_EQ(f.n, f.hull.n + f.rudder.n + f.propeller.n + f.wind.n + f.wave.n);
  EXPECT_EQ(f.propeller.y, 0.0);
  EXPECT_EQ(f.propeller.n, 0.0);
}

TEST(Forces, MissingCoefficientNamesTheKey) {
  VesselParams p = default_vessel_params();
  p.coefficients.erase("R.c_N");
  try {
    compute_forces(VesselState{}, p, EnvDisturbance{}, 0.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("R.c_N"), std::string::npos);
  }
}

TEST(Forces, NanStateRaisesNumericFault) {
  VesselState s;
  s.u = std::nan("");
  EXPECT_THROW(compute_forces(s, default_vessel_params(), EnvDisturbance{}, 100.0), NumericFault);
}

TEST(Accelerations, PureSurgeDecouples) {
  VesselParams p = default_vessel_params();
  p.x_g = 0.0;
  ForceSet f;
  f.x = 12345.0;
  VesselState s;
  s.u = 2.0;
  const Accelerations a = accelerations(s, p, f);
  EXPECT_DOUBLE_EQ(a.u_dot, 12345.0 / (p.mass + p.added_mass_x));
  EXPECT_EQ(a.v_dot, 0.0);
  EXPECT_EQ(a.r_dot, 0.0);
}

TEST(Accelerations, ZeroForcesZeroVelocities) {
  const Accelerations a = accelerations(VesselState{}, default_vessel_params(), ForceSet{});
  EXPECT_EQ(a.u_dot, 0.0);
  EXPECT_EQ(a.v_dot, 0.0);
  EXPECT_EQ(a.r_dot, 0.0);
}

TEST(Accelerations, PlugBackResidualOnRandomStates) {
  const VesselParams p = default_vessel_params();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    VesselState s{100 * U(gen), 100 * U(gen), wrap_2pi(4 * U(gen)), 3.0 + 1.5 * U(gen), 0.5 * U(gen),
                  0.02 * U(gen), deg2rad(20.0) * U(gen)};
    EnvDisturbance env{0.25 + 0.25 * U(gen), wrap_2pi(4 * U(gen)), 7.5 + 7.5 * U(gen), wrap_2pi(4 * U(gen)),
                       1.0 + U(gen), wrap_2pi(4 * U(gen)), 4.0, 50.0, 40.0};
    const ForceSet f = compute_forces(s, p, env, 150.0 + 100.0 * U(gen));
    const Accelerations a = accelerations(s, p, f);
    const auto lhs = eom_lhs(s, p, a);
    const double res = std::sqrt(std::pow(lhs[0] - f.x, 2) + std::pow(lhs[1] - f.y, 2) + std::pow(lhs[2] - f.n, 2));
    const double ref = std::sqrt(f.x * f.x + f.y * f.y + f.n * f.n);
    EXPECT_LT(res, 1e-9 * ref) << "state " << i;
  }
}

TEST(Accelerations, SingularMassMatrixRaises) {
  VesselParams p = default_vessel_params();
  p.inertia_z = 0.0;
  p.added_inertia_z = 0.0;
  p.added_mass_y = 0.0;
  // det = m (x_G² m) − (x_G m)² = 0
  EXPECT_THROW(accelerations(VesselState{}, p, ForceSet{}), ParameterError);
}

TEST(Current, ZeroCurrentLeavesVelocity) {
  VesselState s;
  s.u = 2.5;
  s.v = -0.3;
  s.psi = 1.1;
  const auto [ur, vr] = apply_current(s, EnvDisturbance{});
  EXPECT_EQ(ur, 2.5);
  EXPECT_EQ(vr, -0.3);
}

TEST(Current, AlongBodyAxis) {
  VesselState s;
  s.u = 3.0;
  EnvDisturbance env;
  env.current_speed = 0.5;
  env.current_angle = 0.0;
  const auto [ur, vr] = apply_current(s, env);
  EXPECT_DOUBLE_EQ(ur, 2.5);  // current flows toward north, same as the bow
  EXPECT_DOUBLE_EQ(vr, 0.0);
}

TEST(Current, PerpendicularCurrentIsPureSway) {
  VesselState s;
  s.psi = 0.7 + kPi / 2;
  EnvDisturbance env;
  env.current_speed = 0.4;
  env.current_angle = 0.7;
  const auto [ur, vr] = apply_current(s, env);
  EXPECT_NEAR(ur, 0.0, 1e-15);
  EXPECT_NEAR(vr, 0.4, 1e-15);  // current flows to port of the bow, relative water comes from port
}

TEST(Integrator, FreeMotionMovesFifteenMetres) {
  VesselState s;
  s.u = 3.0;
  const VesselState n = ballistic_update(s, accelerations(s, default_vessel_params(), ForceSet{}), 5.0);
  EXPECT_DOUBLE_EQ(n.x_n, 15.0);
  EXPECT_DOUBLE_EQ(n.y_n, 0.0);
  EXPECT_EQ(n.u, 3.0);
  EXPECT_EQ(n.v, 0.0);
  EXPECT_EQ(n.r, 0.0);
}

TEST(Integrator, ConstantAccelerationFromRest) {
  VesselState s;
  s.psi = deg2rad(30.0);
  const double a = 0.02;
  const VesselState n = ballistic_update(s, Accelerations{a, 0.0, 0.0}, 5.0);
  const double d = a * 25.0 / 2.0;
  EXPECT_NEAR(n.x_n, d * std::cos(s.psi), 1e-15);
  EXPECT_NEAR(n.y_n, d * std::sin(s.psi), 1e-15);
}

TEST(Integrator, SecondOrderConvergenceUnderConstantForcing) {
  const Accelerations acc{0.01, 0.004, 1e-4};
  VesselState s0;
  s0.u = 3.0;
  s0.r = 0.002;
  auto run = [&](double dt) {
    VesselState s = s0;
    const int n = static_cast<int>(std::lround(200.0 / dt));
    for (int i = 0; i < n; ++i) s = ballistic_update(s, acc, dt);
    return s;
  };
  const VesselState ref = run(5.0 / 512);
  auto err = [&](double dt) {
    const VesselState s = run(dt);
    return std::hypot(s.x_n - ref.x_n, s.y_n - ref.y_n);
  };
  const double e1 = err(5.0), e2 = err(2.5), e3 = err(1.25);
  EXPECT_NEAR(e1 / e2, 4.0, 0.5);
  EXPECT_NEAR(e2 / e3, 4.0, 0.5);
}

TEST(Step, DeterministicAndStraightWithoutRudder) {
  VesselModel model(default_vessel_params());
  const double rpm = model.calibrate_rpm(3.0);
  VesselState s;
  s.u = 3.0;
  EnvDisturbance env;
  env.depth = 50.0;
  VesselState a = s, b = s;
  for (int i = 0; i < 100; ++i) {
    a = model.step(a, env, rpm);
    b = step(b, model.params(), env, rpm);
    ASSERT_EQ(a, b);
  }
  EXPECT_LT(std::abs(a.y_n), 1e-6);
  EXPECT_NEAR(a.u, 3.0, 0.01);
  EXPECT_GT(a.x_n, 1400.0);
}

TEST(Step, GroundingWhenDepthBelowDraught) {
  const VesselParams p = default_vessel_params();
  EnvDisturbance env;
  env.depth = 4.0;
  EXPECT_THROW(step(VesselState{}, p, env, 100.0), GroundingError);
  VesselModel model(p);
  EXPECT_THROW(model.step(VesselState{}, env, 100.0), GroundingError);
}

TEST(Step, StarboardRudderTurnsStarboard) {
  VesselModel model(default_vessel_params());
  const double rpm = model.calibrate_rpm(3.0);
  VesselState s;
  s.u = 3.0;
  s.delta = deg2rad(20.0);
  EnvDisturbance env;
  for (int i = 0; i < 20; ++i) s = model.step(s, env, rpm);
  EXPECT_GT(s.r, 0.0);
  EXPECT_GT(s.y_n, 0.0);
}

TEST(ShallowWater, DeepWaterIsIdentity) {
  const VesselParams p = default_vessel_params();
  const VesselParams q = shallow_water_correct(p, 100.0 * p.draught, p.draught);
  EXPECT_TRUE(q == p);
}

TEST(ShallowWater, DepthNotAboveDraughtIsInfeasible) {
  const VesselParams p = default_vessel_params();
  EXPECT_THROW(shallow_water_correct(p, p.draught, p.draught), InfeasibleDepth);
  EXPECT_THROW(shallow_water_correct(p, 1.0, p.draught), InfeasibleDepth);
}

TEST(ShallowWater, ExactRowMultiplier) {
  VesselParams p = default_vessel_params();
  p.shallow_water.rows = {{1.5, {{"m_xb", 1.2}}}};
  const VesselParams q = shallow_water_correct(p, 1.5 * 4.0, 4.0);
  EXPECT_EQ(q.added_mass_x, p.added_mass_x * 1.2);
  EXPECT_EQ(q.added_mass_y, p.added_mass_y);
}

TEST(ShallowWater, BlendsIntoIdentityAtThreshold) {
  VesselParams p = default_vessel_params();
  p.shallow_water.rows = {{3.0, {{"P.w", 1.4}}}};
  const double w = shallow_water_correct(p, 4.0 * 1.0, 1.0).coefficients.at("P.w");
  EXPECT_NEAR(w, p.coefficients.at("P.w") * 1.2, 1e-15);  // halfway between 1.4 at 3 and 1.0 at 5
  const double w_edge = shallow_water_correct(p, 4.999999 * 1.0, 1.0).coefficients.at("P.w");
  EXPECT_NEAR(w_edge, p.coefficients.at("P.w"), 1e-6);
}

TEST(ShallowWater, UnknownKeyIsConfigError) {
  VesselParams p = default_vessel_params();
  p.shallow_water.rows = {{1.5, {{"no.such.key", 1.2}}}};
  EXPECT_THROW(shallow_water_correct(p, 6.0, 4.0), ConfigError);
}

TEST(ShallowWater, CorrectedParamsRemainValid) {
  const VesselParams p = default_vessel_params();
  for (double ht : {1.05, 1.3, 1.7, 2.5, 4.0}) EXPECT_NO_THROW(shallow_water_correct(p, ht * p.draught, p.draught).validate());
}

TEST(Config, JsonRoundTrip) {
  const VesselParams p = default_vessel_params();
  const VesselParams q = vessel_params_from_json(vessel_params_to_json(p));
  EXPECT_EQ(q.mass, p.mass);
  EXPECT_EQ(q.coefficients, p.coefficients);
  EXPECT_EQ(q.shallow_water, p.shallow_water);
  for (double a = 0.0; a < kTwoPi; a += 0.05) {
    EXPECT_NEAR(q.wind_cy(a), p.wind_cy(a), 1e-12);
    EXPECT_NEAR(q.wave_cn(a), p.wave_cn(a), 1e-12);
  }
}

TEST(Config, ShippedFileMatchesBuiltinDefaults) {
  const VesselParams q = load_vessel_params(std::string(ASV_SOURCE_DIR) + "/config/vessel_kvlcc2_surrogate.json");
  const VesselParams p = default_vessel_params();
  EXPECT_EQ(q.coefficients, p.coefficients);
  EXPECT_EQ(q.length_pp, 64.0);
  EXPECT_EQ(q.beam, 11.6);
  EXPECT_NEAR(q.rudder_max, p.rudder_max, 1e-15);
}

TEST(Config, MissingPrincipalKeyNamed) {
  auto j = vessel_params_to_json(default_vessel_params());
  j["principal"].erase("B");
  try {
    vessel_params_from_json(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'B'"), std::string::npos);
  }
}

TEST(Calibration, RpmHoldsTargetSpeed) {
  VesselModel model(default_vessel_params());
  const double rpm = model.calibrate_rpm(3.0);
  EXPECT_GT(rpm, 100.0);
  EXPECT_LT(rpm, 400.0);
  VesselState s;
  s.u = 3.0;
  EXPECT_NEAR(model.forces(s, EnvDisturbance{}, rpm).x, 0.0, 1e-3);
}
