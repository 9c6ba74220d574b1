#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "accsim/actuation.hpp"
#include "accsim/fitlimits.hpp"
#include "oracles.hpp"

using namespace accsim;

namespace {

std::vector<Drive> accel_drives(const LimitModeld& lim, double noise_sd = 0.0) {
  std::vector<Drive> d;
  std::uint64_t seed = 1;
  for (double v0 = 5; v0 <= 35; v0 += 5) d.push_back(synthetic_drive(lim, v0, BoundSide::accel, 3.0, 0.01, 2.0, noise_sd, seed++));
  return d;
}

}  // namespace

TEST(TippingPoints, LieOnTheBoundLine) {
  const LimitModeld lim;
  const auto pts = extract_tipping_points(accel_drives(lim));
  ASSERT_EQ(pts.size(), 7u);
  for (const auto& p : pts) EXPECT_NEAR(p.a, accel_bound(p.v, lim), 1e-3);
}

TEST(TippingPoints, ConstantDriveIsSkipped) {
  Drive flat;
  for (int i = 0; i < 300; ++i) {
    flat.t.push_back(i * 0.01);
    flat.v.push_back(20);
    flat.a.push_back(0);
  }
  const LimitModeld lim;
  const std::vector<Drive> drives{synthetic_drive(lim, 10, BoundSide::accel, 3.0), flat,
                                  synthetic_drive(lim, 20, BoundSide::accel, 3.0)};
  std::vector<std::size_t> skipped;
  const auto pts = extract_tipping_points(drives, 0.5, BoundSide::accel, &skipped);
  EXPECT_EQ(pts.size(), 2u);
  EXPECT_EQ(skipped, std::vector<std::size_t>{1});
}

TEST(TippingPoints, FasterDrivesAccelerateLess) {
  const LimitModeld lim;
  std::vector<Drive> d;
  for (double v0 : {10.0, 20.0, 30.0}) d.push_back(synthetic_drive(lim, v0, BoundSide::accel, 3.0));
  const auto pts = extract_tipping_points(d);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_GT(pts[0].a, pts[1].a);
  EXPECT_GT(pts[1].a, pts[2].a);
}

TEST(FitLinearLimit, RecoversExactLine) {
  const LimitModeld lim{0.45, 0.012, 40.0, 3.0, 0.02};
  std::vector<TippingPoint> pts;
  for (double v : {3.0, 11.0, 17.5, 26.0, 38.0}) pts.push_back({v, accel_bound(v, lim)});
  const auto fit = fit_linear_limit(pts);
  EXPECT_NEAR(fit.intercept, 0.45, 1e-9);
  EXPECT_NEAR(fit.slope, 0.012, 1e-9);
  EXPECT_NEAR(fit.rms, 0.0, 1e-12);
  EXPECT_EQ(fit.n_points, 5u);
}

TEST(FitLinearLimit, TwoPointsAgreeWithOls) {
  const std::vector<TippingPoint> pts{{10.0, 0.9}, {30.0, 0.55}};
  const auto fit = fit_linear_limit(pts, 40.0);
  const auto c = oracle::ols({10.0, 30.0}, {0.9, 0.55});
  EXPECT_NEAR(fit.slope, -c[1], 1e-12);
  EXPECT_NEAR(fit.intercept, c[0] + c[1] * 40.0, 1e-12);
}

TEST(FitLinearLimit, NoisyDrivesStayClose) {
  const LimitModeld lim;
  const auto fit = fit_linear_limit(extract_tipping_points(accel_drives(lim, 0.02)));
  EXPECT_NEAR(fit.intercept / lim.a0, 1.0, 0.05);
  EXPECT_NEAR(fit.slope / lim.beta, 1.0, 0.10);
}

TEST(FitLinearLimit, UnderdeterminedThrows) {
  const std::vector<TippingPoint> same{{20.0, 0.7}, {20.0, 0.72}};
  EXPECT_THROW(fit_linear_limit(same), ValidationError);
  EXPECT_THROW(fit_linear_limit(std::vector<TippingPoint>{}), ValidationError);
}

TEST(FitLinearLimit, DecelerationSideMirrors) {
  const LimitModeld lim;
  std::vector<Drive> d;
  for (double v0 = 10; v0 <= 35; v0 += 5) d.push_back(synthetic_drive(lim, v0, BoundSide::decel, 2.0));
  const auto pts = extract_tipping_points(d, 0.5, BoundSide::decel);
  ASSERT_EQ(pts.size(), 6u);
  for (const auto& p : pts) EXPECT_NEAR(p.a, decel_bound(p.v, lim), 1e-3);
  const auto fit = fit_linear_limit(pts, 40.0, BoundSide::decel);
  EXPECT_NEAR(fit.intercept, lim.d0, 1e-2);
  EXPECT_NEAR(fit.slope, lim.theta, 1e-3);

  const auto accel = fit_linear_limit(extract_tipping_points(accel_drives(lim)));
  const auto model = to_limit_model(accel, fit);
  EXPECT_NEAR(model.a0, lim.a0, 1e-2);
  EXPECT_NEAR(model.d0, lim.d0, 1e-2);
}
