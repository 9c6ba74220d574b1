#include <gtest/gtest.h>

#include <cmath>

#include "accsim/safety.hpp"
#include "accsim/sim.hpp"

using namespace accsim;

namespace {

// Two vehicles at 25 m/s; the leader brakes to 12.5 at -5.
Scenario brake_scenario(double d0) {
  LeadProfiled lead;
  lead.kind = LeadKind::emergency_brake;
  lead.v0 = 25;
  lead.v_final = 12.5;
  lead.a_lead = -5;
  lead.t_start = 5;
  VehicleConfig f;
  f.acc.tau = 1.0;
  f.acc.k_v = 0.5;
  LimitModeld lim;
  lim.d0 = d0;
  lim.theta = 0;
  f.limits = lim;
  return make_scenario(2, f, lead, 80.0);
}

}  // namespace

TEST(RequiredGain, WorkedExample) {
  // -3 / (-5 + 1.5 * 2)
  const auto k = required_gain(20.0, 25.0, -2.0, 1.5, -3.0);
  ASSERT_TRUE(k);
  EXPECT_DOUBLE_EQ(*k, 1.5);
}

TEST(RequiredGain, VacuousWhenNotClosing) {
  EXPECT_FALSE(required_gain(20.0, 20.0, 0.0, 1.5, -3.0));
  EXPECT_FALSE(required_gain(25.0, 20.0, 0.0, 1.5, -3.0));
  // a strongly braking leader pushes the denominator positive too
  EXPECT_FALSE(required_gain(20.0, 25.0, -4.0, 1.5, -3.0));
  EXPECT_THROW(required_gain(20.0, 25.0, -2.0, 1.5, 1.0), ValidationError);
}

TEST(RequiredGain, InverselyProportionalToDenominator) {
  const double k1 = *required_gain(20.0, 28.0, 0.0, 1.5, -3.0);  // denominator -8
  const double k2 = *required_gain(20.0, 24.0, 0.0, 1.5, -3.0);  // denominator -4
  EXPECT_DOUBLE_EQ(k2, 2 * k1);
}

TEST(GainFeasibility, Examples) {
  const auto bad = gain_feasibility(1.5, 1.5);
  EXPECT_FALSE(bad.feasible);
  EXPECT_NEAR(bad.k_max, 1.3333333333, 1e-9);
  const auto ok = gain_feasibility(0.5, 1.5);
  EXPECT_TRUE(ok.feasible);
  EXPECT_DOUBLE_EQ(ok.k_min, 0.5);
  for (double tau : {0.5, 1.5, 4.0}) EXPECT_TRUE(gain_feasibility(0.0, tau).feasible);
  EXPECT_THROW(gain_feasibility(-0.1, 1.5), ValidationError);
}

TEST(RequiredDeceleration, ConstantDecelerationKinematics) {
  // 25 -> 20 within 39.5 - 2 = 37.5 m: (625 - 400) / 75
  EXPECT_DOUBLE_EQ(required_deceleration(25.0, 20.0, 39.5, 2.0), -3.0);
  EXPECT_TRUE(std::isfinite(required_deceleration(25.0, 20.0, 1.0, 2.0)));
  EXPECT_LT(required_deceleration(25.0, 20.0, 1.0, 2.0), -1e6);
}

TEST(TrajectorySafety, EquilibriumPlatoon) {
  LeadProfiled lead;
  lead.v0 = 20;
  const auto log = run(make_scenario(4, VehicleConfig{}, lead, 10.0));
  const auto r = trajectory_safety(log, 2.0);
  EXPECT_NEAR(r.min_spacing, 32.0, 1e-9);
  EXPECT_FALSE(r.crash);
  EXPECT_FALSE(r.takeover_speed);
  EXPECT_GT(r.min_ttc, 1e6);
  ASSERT_EQ(r.pairs.size(), 3u);
}

TEST(TrajectorySafety, TightDecelBoundNearlyCrashes) {
  const auto sc = brake_scenario(2.5);
  const double s_eq = equilibrium_spacing(25.0, sc.followers[0].acc);
  const auto r = trajectory_safety(run(sc), 2.0);
  EXPECT_LT(r.min_spacing, 0.1 * s_eq);
  ASSERT_TRUE(r.takeover_speed);
  EXPECT_GT(*r.takeover_speed, 12.5);
}

TEST(TrajectorySafety, StrongDecelBoundKeepsTheGap) {
  const auto r = trajectory_safety(run(brake_scenario(5.0)), 2.0);
  EXPECT_GE(r.min_spacing, 2.0);
  EXPECT_FALSE(r.crash);
}

TEST(TrajectorySafety, MinSpacingMonotoneInBrakingAuthority) {
  double prev = -INFINITY;
  for (double d0 : {2.5, 3.0, 4.0, 5.0, 6.0}) {
    const double s = trajectory_safety(run(brake_scenario(d0)), 2.0).min_spacing;
    EXPECT_GE(s, prev) << "d0=" << d0;
    prev = s;
  }
}

TEST(TrajectorySafety, CrashImpliesZeroTtcAndNonPositiveSpacing) {
  LeadProfiled lead;
  lead.kind = LeadKind::stop_at_light;
  lead.v0 = 30;
  lead.v_final = 0;
  lead.a_lead = -8;
  lead.t_start = 2;
  VehicleConfig f;
  LimitModeld lim;
  lim.d0 = 1.0;
  lim.theta = 0;
  f.limits = lim;
  const auto log = run(make_scenario(3, f, lead, 60.0));
  const auto r = trajectory_safety(log, 2.0);
  ASSERT_TRUE(r.crash);
  EXPECT_LE(r.min_spacing, 0.0);
  EXPECT_DOUBLE_EQ(r.min_ttc, 0.0);
  ASSERT_FALSE(log.crashes.empty());
  const auto& c = log.crashes.front();
  EXPECT_LE(c.spacing, 0.0);
  EXPECT_DOUBLE_EQ(r.pairs[c.vehicle - 1].min_ttc, 0.0);
  EXPECT_LE(r.pairs[c.vehicle - 1].min_spacing, 0.0);
}
