#pragma once

// Random instance generators and independent oracles shared by the unit and
// acceptance tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mgflow/mgflow.hpp"

namespace mgtest {

using mgflow::Complex;
using mgflow::Mode;
using mgflow::MomentumPolynomial;
using mgflow::TorusField;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Real field with modes |k1|, |k2| <= b and amplitudes decaying like
/// amp / (1 + |k|^2).
inline TorusField random_field(std::mt19937_64& rng, int b, double amp = 1.0) {
  std::vector<Mode> modes;
  for (int k1 = 0; k1 <= b; ++k1)
    for (int k2 = -b; k2 <= b; ++k2) {
      if (k1 == 0 && k2 < 0) continue;
      const double s = amp / (1.0 + k1 * k1 + k2 * k2);
      Complex c(uniform(rng, -s, s), uniform(rng, -s, s));
      if (k1 == 0 && k2 == 0) c = c.real();
      modes.push_back({k1, k2, c});
    }
  return TorusField::from_modes(modes);
}

/// Field depending on y only.
inline TorusField random_y_field(std::mt19937_64& rng, int b, double amp = 1.0, bool with_mean = true) {
  std::vector<Mode> modes;
  if (with_mean) modes.push_back({0, 0, Complex(uniform(rng, -amp, amp), 0.0)});
  for (int k = 1; k <= b; ++k) {
    const double s = amp / (1.0 + k * k);
    modes.push_back({0, k, Complex(uniform(rng, -s, s), uniform(rng, -s, s))});
  }
  return TorusField::from_modes(modes);
}

/// Metric factor mean + random oscillation with amplitude below mean / 2.
inline TorusField random_metric(std::mt19937_64& rng, int b, bool y_only, double mean = 2.0) {
  TorusField osc = y_only ? random_y_field(rng, b, 1.0, false) : random_field(rng, b, 1.0);
  osc = osc - TorusField::constant(osc.mean());
  const double scale = 0.5 * mean / std::max(osc.l1_norm(), 1e-300);
  return TorusField::constant(mean) + osc * scale;
}

inline MomentumPolynomial random_poly(std::mt19937_64& rng, int degree, int b, double amp = 1.0) {
  MomentumPolynomial p;
  for (int s = 0; s <= degree; ++s)
    for (int k = 0; k <= s; ++k) p.set_slice(s, k, random_field(rng, b, amp));
  return p;
}

/// f = phi_y, g = phi_x for a random potential, so f_x = g_y.
inline std::pair<TorusField, TorusField> potential_pair(std::mt19937_64& rng, int b, double amp = 1.0) {
  const TorusField phi = random_field(rng, b, amp);
  return {phi.dy(), phi.dx()};
}

/// Pointwise value by a plain double sum over stored modes.
inline double naive_value(const TorusField& f, double x, double y) {
  Complex acc{};
  for (const auto& m : f.modes()) acc += m.amplitude * std::polar(1.0, m.k1 * x + m.k2 * y);
  return acc.real();
}

/// max |f - g| over a uniform n x n grid, values by naive summation.
inline double grid_distance(const TorusField& f, const TorusField& g, int n = 24) {
  double d = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = mgflow::kTwoPi * i / n + 0.1, y = mgflow::kTwoPi * j / n + 0.05;
      d = std::max(d, std::abs(naive_value(f, x, y) - naive_value(g, x, y)));
    }
  return d;
}

/// Naive evaluation of a momentum polynomial at a phase point.
inline double naive_phase_value(const MomentumPolynomial& F, double x, double y, double p1, double p2) {
  double v = 0.0;
  for (const auto& [e, c] : F.terms()) v += naive_value(c, x, y) * std::pow(p1, e.m1) * std::pow(p2, e.m2);
  return v;
}

inline TorusField trig_y(double a0, std::vector<double> cos_c, std::vector<double> sin_c = {}) {
  return TorusField::trig_y(a0, cos_c, sin_c);
}

/// Degree-3 family with the fixed benchmark parameters.
inline mgflow::FamilySpec benchmark_degree3() {
  mgflow::FamilySpec s;
  s.degree = 3;
  s.lambda = trig_y(2.0, {1.0});
  s.f1 = trig_y(0.0, {}, {1.0});
  s.constants.K1 = 1.0;
  s.constants.s0 = 1.0;
  s.constants.s2 = 0.5;
  return s;
}

/// Degree-4 family with generic constants.
inline mgflow::FamilySpec benchmark_degree4() {
  mgflow::FamilySpec s;
  s.degree = 4;
  s.lambda = trig_y(2.0, {1.0});
  s.f1 = trig_y(0.0, {}, {1.0});
  s.constants.K1 = 0.7;
  s.constants.K3 = -0.3;
  s.constants.s2 = 0.4;
  s.constants.s3 = 0.25;
  s.constants.s5 = 0.3;
  s.constants.s6 = -0.2;
  return s;
}

inline mgflow::FamilySpec random_family(std::mt19937_64& rng, int degree) {
  mgflow::FamilySpec s;
  s.degree = degree;
  s.lambda = random_metric(rng, 3, true);
  s.f1 = random_y_field(rng, 3, 1.0);
  auto& k = s.constants;
  k.K1 = uniform(rng, -1, 1);
  k.K3 = uniform(rng, -1, 1);
  k.s0 = uniform(rng, -1, 1);
  k.s2 = uniform(rng, -1, 1);
  k.s3 = uniform(rng, 0.1, 1);
  k.s5 = uniform(rng, -1, 1);
  k.s6 = uniform(rng, -1, 1);
  return s;
}

}  // namespace mgtest
