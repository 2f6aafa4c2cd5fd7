#include <gtest/gtest.h>

#include <random>

#include "support/support.hpp"

using namespace mgflow;

namespace {

double max_value(const std::map<std::string, double>& m) {
  double r = 0.0;
  for (const auto& [k, v] : m) r = std::max(r, v);
  return r;
}

}  // namespace

TEST(PolyAB, LowOrders) {
  std::mt19937_64 rng(41);
  const auto [f, g] = mgtest::potential_pair(rng, 2);
  const ABPair a0 = poly_AB(0, f, g), a1 = poly_AB(1, f, g), a2 = poly_AB(2, f, g);
  EXPECT_LE(max_coeff_diff(a0.A, f), 1e-15);
  EXPECT_LE(max_coeff_diff(a0.B, g), 1e-15);
  EXPECT_LE(max_coeff_diff(a1.A, (f * f - g * g) * 0.5), 1e-14);
  EXPECT_LE(max_coeff_diff(a1.B, f * g), 1e-14);
  EXPECT_LE(max_coeff_diff(a2.A, (f * f * f - 3.0 * f * g * g) / 6.0), 1e-14);
  EXPECT_LE(max_coeff_diff(a2.B, (3.0 * f * f * g - g * g * g) / 6.0), 1e-14);
}

TEST(PolyAB, PointwiseComplexPower) {
  std::mt19937_64 rng(42);
  const auto [f, g] = mgtest::potential_pair(rng, 2);
  const int n = 5;
  const ABPair ab = poly_AB(n, f, g);
  for (double x : {0.4, 3.1})
    for (double y : {1.2, 5.5}) {
      const std::complex<double> z(f.value(x, y), g.value(x, y));
      const std::complex<double> w = std::pow(z, n + 1) / 720.0;
      EXPECT_NEAR(ab.A.value(x, y), w.real(), 1e-13);
      EXPECT_NEAR(ab.B.value(x, y), w.imag(), 1e-13);
    }
}

TEST(PolyAB, SumAndComplexFormsAgree) {
  std::mt19937_64 rng(43);
  const auto [f, g] = mgtest::potential_pair(rng, 2, 0.5);
  for (int n = 0; n <= 8; ++n) EXPECT_NO_THROW(poly_AB_checked(n, f, g, 1e-12)) << n;
}

TEST(Recurrence, RandomPotential) {
  std::mt19937_64 rng(44);
  const auto [f, g] = mgtest::potential_pair(rng, 3, 0.7);
  for (int n = 0; n <= 5; ++n) {
    const RecurrenceResiduals r = lemma4_check(n, f, g);
    EXPECT_LE(std::max({r.a_relation, r.b_relation, r.ay_identity, r.bx_identity}), 1e-10) << n;
  }
}

TEST(Recurrence, ConstantsAndPrecondition) {
  const RecurrenceResiduals r = lemma4_check(2, TorusField::constant(0.3), TorusField::constant(-1.1));
  EXPECT_EQ(r.a_relation, 0.0);
  EXPECT_EQ(r.b_relation, 0.0);
  const TorusField f = TorusField::from_modes({{1, 0, 0.5}});
  EXPECT_THROW(lemma4_check(1, f, f), PreconditionError);
}

TEST(CascadeConstants, ProductFormula) {
  for (int N = 1; N <= 8; ++N)
    for (int j = 0; j <= N; ++j) {
      double want = j % 2 == 0 ? 1.0 : -1.0;
      for (int i = N - j; i <= N - 1; ++i) want *= i;
      for (int i = 0; i < j; ++i) want /= N;
      EXPECT_NEAR(cascade_c(N, j), want, 1e-15) << N << " " << j;
    }
}

TEST(ClosedForm, ExplicitLowOrders) {
  std::mt19937_64 rng(45);
  const auto [f, g] = mgtest::potential_pair(rng, 2, 0.6);
  for (int N = 3; N <= 6; ++N) {
    CascadeCoefficients k;
    k.N = N;
    for (int j = 2; j <= N; ++j) {
      k.a[j] = mgtest::uniform(rng, -1, 1);
      k.b[j] = mgtest::uniform(rng, -1, 1);
    }
    const ClosedFormCascade cf = cascade_closed_form(k, f, g);
    const double n = N;
    const ABPair A0 = poly_AB(0, f, g), A1 = poly_AB(1, f, g), A2 = poly_AB(2, f, g);
    // written out independently of explicit_alpha_beta
    const TorusField al2 = TorusField::constant(k.a[2] / n) - A1.A * ((n - 1) / n);
    const TorusField al3 = TorusField::constant(k.a[3] / n) - (A0.A * k.a[2] - A0.B * k.b[2]) * ((n - 2) / (n * n)) +
                           A2.A * ((n - 2) * (n - 1) / (n * n));
    const TorusField be3 = TorusField::constant(k.b[3] / n) - (A0.B * k.a[2] + A0.A * k.b[2]) * ((n - 2) / (n * n)) +
                           A2.B * ((n - 2) * (n - 1) / (n * n));
    EXPECT_LE(max_coeff_diff(cf.alpha[2], al2), 1e-14);
    EXPECT_LE(max_coeff_diff(cf.alpha[3], al3), 1e-14);
    EXPECT_LE(max_coeff_diff(cf.beta[3], be3), 1e-14);
    EXPECT_LE(max_value(second_order_cascade_residuals(cf, f, g)), 1e-10);
  }
}

TEST(ClosedForm, ZeroConstantsLeaveLeadingTerm) {
  std::mt19937_64 rng(46);
  const auto [f, g] = mgtest::potential_pair(rng, 2, 0.6);
  for (int N = 2; N <= 8; ++N) {
    CascadeCoefficients k;
    k.N = N;
    const ClosedFormCascade cf = cascade_closed_form(k, f, g);
    for (int j = 2; j <= N; ++j) {
      const ABPair ab = poly_AB(j - 1, f, g);
      EXPECT_LE(max_coeff_diff(cf.alpha[j], ab.A * cascade_c(N, j - 1)), 1e-13);
      EXPECT_LE(max_coeff_diff(cf.beta[j], ab.B * cascade_c(N, j - 1)), 1e-13);
    }
    EXPECT_LE(max_value(second_order_cascade_residuals(cf, f, g)), 1e-10);
  }
}

TEST(ClosedForm, SpectralIntegrationAgrees) {
  std::mt19937_64 rng(47);
  const auto [f, g] = mgtest::potential_pair(rng, 2, 0.5);
  CascadeCoefficients k;
  k.N = 5;
  for (int j = 2; j <= 5; ++j) k.a[j] = 0.1 * j, k.b[j] = -0.2 * j;
  const ClosedFormCascade cf = cascade_closed_form(k, f, g);
  for (int j = 2; j <= 5; ++j) {
    const ABPair s = spectral_cascade_step(cf, j, f, g);
    EXPECT_LE(max_coeff_diff(s.A, cf.alpha[j]), 1e-13) << j;
    EXPECT_LE(max_coeff_diff(s.B, cf.beta[j]), 1e-13) << j;
  }
}
