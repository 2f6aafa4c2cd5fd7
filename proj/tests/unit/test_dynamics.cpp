#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/support.hpp"

using namespace mgflow;

namespace {

// All pairs of sampled characteristics, intersected directly in the plane.
double brute_force_first_crossing(const CharField& cf, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double ti = cf.length * i / n, tj = cf.length * j / n;
      const double gi = cf.g0(ti), gj = cf.g0(tj);
      // x = t + s * (-alpha / beta), y = s
      const double si = -cf.alpha(gi) / cf.beta(gi), sj = -cf.alpha(gj) / cf.beta(gj);
      if (si == sj) continue;
      const double y = (tj - ti) / (si - sj);
      if (y > 0.0) best = std::min(best, y);
    }
  return best;
}

}  // namespace

TEST(Flow, FreeMotionIsStraight) {
  const FlowField field(TorusField::constant(1.0), TorusField{}, 4.0);
  StepControl ctl;
  ctl.sample_interval = 0.5;
  const Trajectory t = integrate_flow(field, {0.1, 0.2, 0.6}, 3.0, ctl);
  ASSERT_EQ(t.times.size(), 7u);
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    const double s = t.times[i];
    EXPECT_NEAR(t.unwrapped[i][0], 0.1 + 2.0 * std::cos(0.6) * s, 1e-10);
    EXPECT_NEAR(t.unwrapped[i][1], 0.2 + 2.0 * std::sin(0.6) * s, 1e-10);
    EXPECT_NEAR(t.unwrapped[i][2], 0.6, 1e-14);
  }
}

TEST(Flow, ConstantFieldCircleClosesAfterPeriod) {
  const double w = 1.3, period = kTwoPi / w;
  const FlowField field(TorusField::constant(1.0), TorusField::constant(w), 1.0);
  StepControl ctl;
  ctl.sample_interval = period / 4;
  const Trajectory t = integrate_flow(field, {2.0, 1.0, 0.0}, period, ctl);
  const FlowState& e = t.unwrapped.back();
  EXPECT_NEAR(e[0], 2.0, 1e-9);
  EXPECT_NEAR(e[1], 1.0, 1e-9);
  EXPECT_NEAR(e[2], -kTwoPi, 1e-9);
  // a quarter turn moves by the Larmor radius 1/w in both coordinates
  EXPECT_NEAR(t.unwrapped[1][0], 2.0 + 1.0 / w, 1e-9);
  EXPECT_NEAR(t.unwrapped[1][1], 1.0 - 1.0 / w, 1e-9);
}

TEST(Flow, HamiltonianDrift) {
  std::mt19937_64 rng(61);
  const TorusField L = mgtest::random_metric(rng, 2, false);
  const FlowField field(L, mgtest::random_field(rng, 2), 1.5);
  const Trajectory t = integrate_flow(field, {0.5, 0.5, 1.0}, 30.0);
  EXPECT_LE(drift_report(field, t, {hamiltonian(L)})[0], 1e-9);
}

TEST(Flow, FamilyIntegralsConserved) {
  const FamilySpec spec = mgtest::benchmark_degree3();
  const FlowField field(spec.lambda, spec.omega(), 1.0);
  const Trajectory t = integrate_flow(field, {0.3, 0.7, 0.4}, 100.0);
  const auto drift = drift_report(field, t, {linear_family(spec.f1, 3).F1, build_family(spec)});
  EXPECT_LE(drift[0], 1e-8);
  EXPECT_LE(drift[1], 1e-7);
}

TEST(Flow, FixedStepConvergesAtFourthOrder) {
  const FamilySpec spec = mgtest::benchmark_degree3();
  const FlowField field(spec.lambda, spec.omega(), 1.0);
  const MomentumPolynomial F3 = build_family(spec);
  StepControl ctl;
  ctl.mode = StepControl::Mode::fixed;
  ctl.step = 0.04;
  const double coarse = drift_report(field, integrate_flow(field, {0.3, 0.7, 0.4}, 50.0, ctl), {F3})[0];
  ctl.step = 0.02;
  const double fine = drift_report(field, integrate_flow(field, {0.3, 0.7, 0.4}, 50.0, ctl), {F3})[0];
  EXPECT_GE(coarse / fine, 8.0);
}

TEST(Flow, StatesStayOnTorusAndTimesIncrease) {
  const FamilySpec spec = mgtest::benchmark_degree4();
  const FlowField field(spec.lambda, spec.omega(), 3.0);
  StepControl ctl;
  ctl.sample_interval = 0.3;
  const Trajectory t = integrate_flow(field, {6.0, 6.1, 2.0}, 10.0, ctl);
  EXPECT_EQ(t.times.front(), 0.0);
  EXPECT_EQ(t.times.back(), 10.0);
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    EXPECT_GE(t.states[i][0], 0.0);
    EXPECT_LT(t.states[i][0], kTwoPi);
    EXPECT_GE(t.states[i][1], 0.0);
    EXPECT_LT(t.states[i][1], kTwoPi);
    if (i > 0) {
      EXPECT_GT(t.times[i], t.times[i - 1]);
    }
  }
}

TEST(Flow, Preconditions) {
  EXPECT_THROW(FlowField(TorusField::constant(1.0), TorusField{}, -1.0), PreconditionError);
  const FlowField field(TorusField::constant(1.0), TorusField{}, 1.0);
  EXPECT_THROW(integrate_flow(field, {0, 0, 0}, 0.0), PreconditionError);
  StepControl ctl;
  ctl.sample_interval = 0.0;
  EXPECT_THROW(integrate_flow(field, {0, 0, 0}, 1.0, ctl), PreconditionError);
}

TEST(TorusDistance, WrapsAround) {
  EXPECT_NEAR(torus_distance(0.1, 0.0, kTwoPi - 0.1, 0.0), 0.2, 1e-14);
  EXPECT_NEAR(torus_distance(0.0, 0.0, 3.0, 4.0), std::hypot(3.0, kTwoPi - 4.0), 1e-14);
}

TEST(Blowup, HopfSineBreaksAtOne) {
  const BlowupResult r = characteristics_blowup(hopf_char_field([](double x) { return std::sin(x); }));
  ASSERT_EQ(r.kind, BlowupResult::Kind::blowup);
  EXPECT_NEAR(r.time, 1.0, 1e-6);
  // the steepest descent of sin is at x = pi
  EXPECT_NEAR(r.g_first, 0.0, 1e-2);
  EXPECT_EQ(to_string(r.kind), "blowup");
}

TEST(Blowup, ScaledAmplitude) {
  const BlowupResult r = characteristics_blowup(hopf_char_field([](double x) { return 0.25 * std::sin(2 * x); }));
  ASSERT_EQ(r.kind, BlowupResult::Kind::blowup);
  EXPECT_NEAR(r.time, 2.0, 1e-6);
}

TEST(Blowup, ConstantDataNeverBreaks) {
  const BlowupResult r = characteristics_blowup(hopf_char_field([](double) { return 0.4; }));
  EXPECT_EQ(r.kind, BlowupResult::Kind::constant_only);
  EXPECT_EQ(to_string(r.kind), "constant_only");
}

TEST(Blowup, CubicVelocitiesMatchBruteForce) {
  const CharField cf = cubic_char_field(1.0, 0.0, 0.0, 1, [](double x) { return 1.0 + 0.5 * std::sin(x); });
  // K2 = K3 = 0: alpha = -4 sqrt(3) g^4, beta = 12 g^3 sqrt(g^2 + 3)
  for (double g : {0.5, 1.0, 1.5}) {
    EXPECT_NEAR(cf.alpha(g), -4 * std::sqrt(3.0) * std::pow(g, 4), 1e-12);
    EXPECT_NEAR(cf.beta(g), 12 * std::pow(g, 3) * std::sqrt(g * g + 3), 1e-12);
  }
  const BlowupResult r = characteristics_blowup(cf);
  ASSERT_EQ(r.kind, BlowupResult::Kind::blowup);
  EXPECT_TRUE(std::isfinite(r.time));
  const double oracle = brute_force_first_crossing(cf, 600);
  EXPECT_LE(r.time, oracle * (1 + 1e-9));
  EXPECT_NEAR(r.time, oracle, 1e-3 * oracle);
}

TEST(Blowup, BranchValidated) {
  EXPECT_THROW(cubic_char_field(1.0, 0.0, 0.0, 0, [](double) { return 1.0; }), PreconditionError);
  const CharField bad = cubic_char_field(0.0, 0.0, 1.0, 1, [](double x) { return 0.5 + 0.1 * std::sin(x); });
  EXPECT_THROW(characteristics_blowup(bad), PreconditionError);
}
