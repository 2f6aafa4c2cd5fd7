#pragma once

// Polynomials in the momenta (p1, p2) with TorusField coefficients, the
// conformal Hamiltonian and the magnetic Poisson bracket
//
//   {F, G} = sum_i (F_xi G_pi - F_pi G_xi) + Omega (F_p1 G_p2 - F_p2 G_p1).

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <utility>

#include "mgflow/torus_field.hpp"

namespace mgflow {

/// Exponent pair (m1, m2) of the monomial p1^m1 p2^m2.
struct Exponent {
  int m1 = 0;
  int m2 = 0;
  int total() const { return m1 + m2; }
  auto operator<=>(const Exponent&) const = default;
};

class MomentumPolynomial {
 public:
  using TermMap = std::map<Exponent, TorusField>;

  MomentumPolynomial() = default;

  /// c p1^m1 p2^m2.
  static MomentumPolynomial monomial(int m1, int m2, TorusField c = TorusField::constant(1.0)) {
    MomentumPolynomial p;
    p.set(m1, m2, std::move(c));
    return p;
  }
  static MomentumPolynomial constant(TorusField c) { return monomial(0, 0, std::move(c)); }
  static MomentumPolynomial constant(double c) { return monomial(0, 0, TorusField::constant(c)); }
  static MomentumPolynomial p1() { return monomial(1, 0); }
  static MomentumPolynomial p2() { return monomial(0, 1); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Highest total exponent present; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.total());
    return d;
  }

  const TorusField& coeff(int m1, int m2) const {
    static const TorusField zero;
    auto it = terms_.find({m1, m2});
    return it == terms_.end() ? zero : it->second;
  }

  /// Homogeneous-slice indexing a_{s,k} = coefficient of p1^(s-k) p2^k; zero
  /// whenever k < 0, k > s or s < 0.
  const TorusField& slice_coeff(int s, int k) const {
    static const TorusField zero;
    if (s < 0 || k < 0 || k > s) return zero;
    return coeff(s - k, k);
  }

  void set(int m1, int m2, TorusField c) {
    if (m1 < 0 || m2 < 0) throw PreconditionError("negative momentum exponent");
    if (c.is_zero()) {
      terms_.erase({m1, m2});
    } else {
      terms_[{m1, m2}] = std::move(c);
    }
  }
  void set_slice(int s, int k, TorusField c) { set(s - k, k, std::move(c)); }

  void add_to(int m1, int m2, const TorusField& c) {
    if (c.is_zero()) return;
    auto it = terms_.find({m1, m2});
    if (it == terms_.end()) {
      terms_.emplace(Exponent{m1, m2}, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  /// Largest coefficient sup-norm.
  double sup_norm() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, mgflow::sup_norm(c));
    return m;
  }

  /// Largest stored Fourier amplitude over all coefficients.
  double max_amplitude() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, c.max_amplitude());
    return m;
  }

  // -- algebra ----------------------------------------------------------------

  MomentumPolynomial& operator+=(const MomentumPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_to(e.m1, e.m2, c);
    return *this;
  }
  MomentumPolynomial& operator-=(const MomentumPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_to(e.m1, e.m2, -c);
    return *this;
  }
  MomentumPolynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
    } else {
      for (auto& [e, c] : terms_) c *= s;
    }
    return *this;
  }

  friend MomentumPolynomial operator+(MomentumPolynomial a, const MomentumPolynomial& b) {
    return a += b;
  }
  friend MomentumPolynomial operator-(MomentumPolynomial a, const MomentumPolynomial& b) {
    return a -= b;
  }
  friend MomentumPolynomial operator-(MomentumPolynomial a) { return a *= -1.0; }
  friend MomentumPolynomial operator*(MomentumPolynomial a, double s) { return a *= s; }
  friend MomentumPolynomial operator*(double s, MomentumPolynomial a) { return a *= s; }
  friend MomentumPolynomial operator+(MomentumPolynomial a, double s) {
    a.add_to(0, 0, TorusField::constant(s));
    return a;
  }
  friend MomentumPolynomial operator+(double s, MomentumPolynomial a) { return std::move(a) + s; }
  friend MomentumPolynomial operator-(MomentumPolynomial a, double s) { return std::move(a) + (-s); }

  friend MomentumPolynomial operator*(const TorusField& f, const MomentumPolynomial& a) {
    MomentumPolynomial r;
    if (f.is_zero()) return r;
    for (const auto& [e, c] : a.terms_) r.set(e.m1, e.m2, f * c);
    return r;
  }

  friend MomentumPolynomial operator*(const MomentumPolynomial& a, const MomentumPolynomial& b) {
    MomentumPolynomial r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_to(ea.m1 + eb.m1, ea.m2 + eb.m2, ca * cb);
    return r;
  }
  MomentumPolynomial& operator*=(const MomentumPolynomial& o) { return *this = *this * o; }

  // -- derivatives -----------------------------------------------------------

  MomentumPolynomial d_dp1() const {
    MomentumPolynomial r;
    for (const auto& [e, c] : terms_)
      if (e.m1 > 0) r.set(e.m1 - 1, e.m2, c * double(e.m1));
    return r;
  }
  MomentumPolynomial d_dp2() const {
    MomentumPolynomial r;
    for (const auto& [e, c] : terms_)
      if (e.m2 > 0) r.set(e.m1, e.m2 - 1, c * double(e.m2));
    return r;
  }
  MomentumPolynomial d_dx() const { return map_coeffs([](const TorusField& c) { return c.dx(); }); }
  MomentumPolynomial d_dy() const { return map_coeffs([](const TorusField& c) { return c.dy(); }); }

  template <class Fn>
  MomentumPolynomial map_coeffs(Fn&& fn) const {
    MomentumPolynomial r;
    for (const auto& [e, c] : terms_) r.set(e.m1, e.m2, fn(c));
    return r;
  }

  /// Largest coefficient-wise Fourier amplitude of a - b.
  friend double max_coeff_diff(const MomentumPolynomial& a, const MomentumPolynomial& b) {
    const MomentumPolynomial d = a - b;
    return d.max_amplitude();
  }

 private:
  TermMap terms_;
};

inline MomentumPolynomial pow(const MomentumPolynomial& p, int n) {
  if (n < 0) throw PreconditionError("negative polynomial power");
  MomentumPolynomial r = MomentumPolynomial::constant(1.0);
  for (int i = 0; i < n; ++i) r = r * p;
  return r;
}

/// Phase-space point; positions are reduced to [0, 2 pi).
struct PhasePoint {
  double x = 0.0;
  double y = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  PhasePoint() = default;
  PhasePoint(double x_, double y_, double p1_, double p2_)
      : x(reduce(x_)), y(reduce(y_)), p1(p1_), p2(p2_) {}

  static double reduce(double v) {
    double r = std::fmod(v, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r;
  }
};

/// H = (p1^2 + p2^2) / (2 Lambda) with 1/Lambda from reciprocal(Lambda, tol).
inline MomentumPolynomial hamiltonian(const TorusField& lambda, double tol = kDefaultReciprocalTol) {
  const TorusField half_inv = reciprocal(lambda, tol) * 0.5;
  MomentumPolynomial h;
  h.set(2, 0, half_inv);
  h.set(0, 2, half_inv);
  return h;
}

/// Magnetic Poisson bracket {F, G} with magnetic field omega.
inline MomentumPolynomial magnetic_bracket(const MomentumPolynomial& f, const MomentumPolynomial& g,
                                           const TorusField& omega) {
  const MomentumPolynomial fp1 = f.d_dp1(), fp2 = f.d_dp2();
  const MomentumPolynomial gp1 = g.d_dp1(), gp2 = g.d_dp2();
  MomentumPolynomial r = f.d_dx() * gp1 + f.d_dy() * gp2 - fp1 * g.d_dx() - fp2 * g.d_dy();
  if (!omega.is_zero()) r += omega * (fp1 * gp2 - fp2 * gp1);
  return r;
}

/// Canonical bracket (omega = 0).
inline MomentumPolynomial canonical_bracket(const MomentumPolynomial& f, const MomentumPolynomial& g) {
  return magnetic_bracket(f, g, TorusField{});
}

/// Value of F at a phase point by spectral summation of each coefficient.
inline double evaluate_phase(const MomentumPolynomial& f, const PhasePoint& pt) {
  double total = 0.0;
  for (const auto& [e, c] : f.terms())
    total += c.value(pt.x, pt.y) * std::pow(pt.p1, e.m1) * std::pow(pt.p2, e.m2);
  return total;
}

}  // namespace mgflow
