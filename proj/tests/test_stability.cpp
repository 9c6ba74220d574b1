#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "accsim/sim.hpp"
#include "accsim/stability.hpp"
#include "oracles.hpp"

using namespace accsim;

namespace {

// Two-vehicle run, ideal actuation, no limits, lead = 20 + sin(w t).
// Returns follower/leader half-swing ratio measured after transients.
double simulated_ratio(double k, double tau, double w, double dt = 0.01) {
  LeadProfiled lead;
  lead.kind = LeadKind::sine_sum;
  lead.v0 = 20;
  lead.components = {{1.0, w}};
  VehicleConfig f;
  f.acc.k_v = k;
  f.acc.tau = tau;
  f.acc.v_set = 100;
  f.limits.reset();
  f.actuation = Actuation::ideal;
  const double settle = 12.0 / k;
  const double period = 2 * M_PI / w;
  const auto log = run(make_scenario(2, f, lead, settle + 4 * period, dt));
  std::vector<double> t(log.t.data(), log.t.data() + log.ticks());
  std::vector<double> v0(log.v.col(0).data(), log.v.col(0).data() + log.ticks());
  std::vector<double> v1(log.v.col(1).data(), log.v.col(1).data() + log.ticks());
  return oracle::half_swing(t, v1, settle, t.back()) / oracle::half_swing(t, v0, settle, t.back());
}

}  // namespace

TEST(SsCondition, VerdictFollowsKTau) {
  EXPECT_EQ(ss_condition(0.5, 2.0), SsVerdict::string_stable);
  EXPECT_EQ(ss_condition(2.0 / 1.5, 1.5), SsVerdict::marginal);
  EXPECT_EQ(ss_condition(2.0 / 3.0, 3.0), SsVerdict::marginal);
  EXPECT_EQ(ss_condition(1.5, 2.0), SsVerdict::unstable);
  // the marginal band is a relative 1e-12
  EXPECT_EQ(ss_condition(1.0 * (1 + 1e-13), 2.0), SsVerdict::marginal);
  EXPECT_EQ(ss_condition(1.0 * (1 + 1e-9), 2.0), SsVerdict::unstable);
  EXPECT_EQ(ss_condition(1.0 * (1 - 1e-9), 2.0), SsVerdict::string_stable);
}

TEST(TfMagnitude, UnitDcGain) {
  for (double k : {0.1, 0.5, 2.0})
    for (double tau : {0.5, 1.5, 3.0}) EXPECT_DOUBLE_EQ(tf_magnitude(k, tau, 0.0), 1.0);
}

TEST(TfMagnitude, MarginalIsAllPass) {
  for (double tau : {0.8, 1.5, 2.5})
    for (double w : {0.1, 1.0, 10.0}) EXPECT_NEAR(tf_magnitude(2.0 / tau, tau, w), 1.0, 1e-12);
}

TEST(TfMagnitude, AgreesWithComplexEvaluation) {
  for (double k : {0.2, 0.7, 1.6})
    for (double tau : {0.6, 1.5, 2.4})
      for (double w : {0.01, 0.3, 2.0, 40.0}) EXPECT_NEAR(tf_magnitude(k, tau, w), oracle::gain_complex(k, tau, w), 1e-12);
}

TEST(TfMagnitude, HighFrequencyLimit) {
  for (double k : {0.3, 0.9})
    for (double tau : {1.0, 2.0, 3.0}) {
      const double limit = std::abs(1 - k * tau);
      if (limit < 1e-6) continue;
      EXPECT_NEAR(tf_magnitude(k, tau, 1e3 * k) / limit, 1.0, 0.01);
    }
}

TEST(TfMagnitude, VectorOverloadMatchesScalar) {
  const Eigen::ArrayXd w = frequency_grid();
  const Eigen::ArrayXd g = tf_magnitude(0.5, 1.5, w);
  ASSERT_EQ(g.size(), 64);
  for (Eigen::Index i = 0; i < w.size(); ++i) EXPECT_DOUBLE_EQ(g[i], tf_magnitude(0.5, 1.5, w[i]));
}

TEST(TfMagnitude, SimulatedTwoVehicleOracle) {
  // k = 0.5, tau = 2: |G(0.5)| = sqrt(0.5)
  EXPECT_NEAR(simulated_ratio(0.5, 2.0, 0.5), 0.7071, 0.02 * 0.7071);
  for (double kt : {0.5, 1.9, 2.5})
    for (double w : {0.2, 0.5, 1.0}) {
      const double tau = 1.5, k = kt / tau;
      EXPECT_NEAR(simulated_ratio(k, tau, w) / tf_magnitude(k, tau, w), 1.0, 0.02) << "kt=" << kt << " w=" << w;
    }
}

TEST(FrequencyGrid, LogSpacedDefault) {
  const auto w = frequency_grid();
  ASSERT_EQ(w.size(), 64);
  EXPECT_NEAR(w[0], 0.01, 1e-15);
  EXPECT_NEAR(w[63], 10.0, 1e-12);
  for (Eigen::Index i = 1; i + 1 < w.size(); ++i) EXPECT_NEAR(w[i] * w[i], w[i - 1] * w[i + 1], 1e-12 * w[i] * w[i]);
  EXPECT_THROW(frequency_grid(0.0, 1.0, 4), ValidationError);
}

TEST(AnalyzeSs, ReportConsistentWithCondition) {
  for (double kt : {0.5, 2.0, 3.0}) {
    const auto r = analyze_ss(kt / 1.5, 1.5);
    EXPECT_NEAR(r.k_tau, kt, 1e-12);
    EXPECT_EQ(r.verdict, ss_condition(kt / 1.5, 1.5));
    ASSERT_EQ(r.gains.size(), 64u);
    for (const auto& g : r.gains) {
      if (r.verdict == SsVerdict::string_stable) EXPECT_LE(g.magnitude, 1.0);
      if (r.verdict == SsVerdict::marginal) EXPECT_NEAR(g.magnitude, 1.0, 1e-9);
      if (r.verdict == SsVerdict::unstable) EXPECT_GT(g.magnitude, 1.0);
    }
  }
  EXPECT_THROW(analyze_ss(0.0, 1.5), ValidationError);
}

TEST(Dampening, SingleAndMultiSineStable) {
  const std::vector<SineComponent<double>> one{{2.0, 0.3}};
  EXPECT_TRUE(dampening_verdict(one, 0.5, 1.5).dampens);

  const std::vector<SineComponent<double>> natural{{1.5, 0.1}, {0.8, 0.35}, {0.4, 1.2}};
  const auto r = dampening_verdict(natural, 0.6, 1.5);
  EXPECT_TRUE(r.dampens);
  EXPECT_EQ(r.verdict, SsVerdict::string_stable);
  ASSERT_EQ(r.components.size(), 3u);
  for (const auto& c : r.components) EXPECT_LT(c.magnitude, 1.0);
}

TEST(Dampening, UnstableAmplifiesEveryComponent) {
  const std::vector<SineComponent<double>> natural{{1.5, 0.1}, {0.8, 0.35}, {0.4, 1.2}};
  const auto r = dampening_verdict(natural, 2.2 / 1.5, 1.5);
  EXPECT_FALSE(r.dampens);
  EXPECT_EQ(r.verdict, SsVerdict::unstable);
  for (const auto& c : r.components) EXPECT_GT(c.magnitude, 1.0);
}

TEST(Dampening, MarginalCountsAsDampening) {
  const std::vector<SineComponent<double>> natural{{1.5, 0.1}, {0.8, 0.35}, {0.4, 1.2}};
  EXPECT_TRUE(dampening_verdict(natural, 2.0 / 1.5, 1.5).dampens);
}

TEST(OdeResponse, StartsAtEquilibrium) {
  for (double k : {0.2, 0.5, 1.5})
    for (double w : {0.1, 0.5, 2.0}) EXPECT_NEAR(ode_response(k, 1.5, 3.0, w, 20.0, 0.0), 20.0, 1e-12);
}

TEST(OdeResponse, NoPerturbationNoResponse) {
  for (double t : {0.0, 3.0, 50.0}) EXPECT_DOUBLE_EQ(ode_response(0.5, 1.5, 0.0, 0.4, 20.0, t), 20.0);
}

TEST(OdeResponse, MatchesRk4Integration) {
  EXPECT_NEAR(ode_response(0.5, 2.0, 2.0, 0.5, 20.0, 40.0), oracle::follower_speed_rk4(0.5, 2.0, 2.0, 0.5, 20.0, 40.0),
              1e-3);
}

TEST(OdeResponse, SteadyAmplitudeIsTransferGain) {
  for (double k : {0.3, 0.8, 1.4})
    for (double tau : {1.0, 1.5, 2.2})
      for (double w : {0.1, 0.5, 1.5}) {
        const double t0 = 12.0 / k, period = 2 * M_PI / w;
        std::vector<double> t, v;
        for (double s = t0; s <= t0 + 2 * period; s += period / 2000) {
          t.push_back(s);
          v.push_back(ode_response(k, tau, 1.0, w, 20.0, s));
        }
        EXPECT_NEAR(oracle::half_swing(t, v, t0, t.back()) / tf_magnitude(k, tau, w), 1.0, 0.005);
      }
}

TEST(OdeResponse, LowFrequencyLagIsTheHeadway) {
  for (double tau : {1.0, 1.5, 2.0})
    for (double kt : {0.5, 1.0, 2.0}) {
      const double k = kt / tau, w = 0.2 / tau;
      const double period = 2 * M_PI / w;
      const double t0 = 15.0 / k + 2 * period;
      std::vector<double> t, lead, foll;
      for (double s = t0; s <= t0 + 1.5 * period; s += 0.01) {
        t.push_back(s);
        lead.push_back(20 + std::sin(w * s));
        foll.push_back(ode_response(k, tau, 1.0, w, 20.0, s));
      }
      const double tl = oracle::peak_time(t, lead, t0, t0 + period);
      const double tf = oracle::peak_time(t, foll, tl, tl + period / 2);
      EXPECT_GE(tf - tl, 0.8 * tau);
      EXPECT_LE(tf - tl, 1.2 * tau);
    }
}
