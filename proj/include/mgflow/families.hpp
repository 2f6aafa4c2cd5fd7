#pragma once

// Closed-form integrable families: metrics Lambda(y), magnetic fields
// Omega(y) = f1'(y) / N, the linear integral F1 = p1 - f1 / N and the
// cubic and quartic integrals expressed through F1 and H.

#include <map>
#include <string>

#include "mgflow/cascade.hpp"
#include "mgflow/momentum_poly.hpp"

namespace mgflow {

/// Free constants of a family; names follow the coefficient formulas.
struct FamilyConstants {
  double K1 = 0.0;
  double K3 = 0.0;
  double s0 = 0.0;
  double s1 = 0.0;  // must stay 0: the cubic family forces a1 = 0
  double s2 = 0.0;
  double s3 = 0.0;
  double s5 = 0.0;
  double s6 = 0.0;
};

struct FamilySpec {
  int degree = 3;
  TorusField lambda;
  TorusField f1;
  FamilyConstants constants;
  double reciprocal_tol = kDefaultReciprocalTol;

  void validate() const {
    if (degree < 1) throw PreconditionError("family degree must be >= 1");
    if (!lambda.depends_on_y_only()) throw PreconditionError("family metric must depend on y only");
    if (!f1.depends_on_y_only()) throw PreconditionError("family f1 must depend on y only");
    if (f1.bandwidth() <= 0) throw PreconditionError("family f1 must be non-constant");
    if (constants.s1 != 0.0) throw PreconditionError("s1 must be 0 (the cubic coefficient a1 vanishes)");
  }

  TorusField omega() const { return f1.dy() / double(degree); }
};

struct LinearFamily {
  MomentumPolynomial F1;
  TorusField omega;
};

/// F1 = p1 - f / N and Omega = f' / N.
inline LinearFamily linear_family(const TorusField& f, int degree) {
  if (degree < 1) throw PreconditionError("linear family needs N >= 1");
  if (!f.depends_on_y_only()) throw PreconditionError("linear family requires f = f(y)");
  LinearFamily lf;
  lf.F1 = MomentumPolynomial::p1();
  lf.F1.add_to(0, 0, -f / double(degree));
  lf.omega = f.dy() / double(degree);
  return lf;
}

/// Cubic integral assembled coefficient by coefficient.
inline MomentumPolynomial degree3_family(const FamilySpec& spec) {
  if (spec.degree != 3) throw PreconditionError("degree3_family needs degree 3");
  spec.validate();
  const auto& k = spec.constants;
  const TorusField inv = reciprocal(spec.lambda, spec.reciprocal_tol);
  const TorusField& f = spec.f1;

  const TorusField a0 = inv * k.s0 - 1.0;
  const TorusField a2 = a0 + 1.0;
  const TorusField b2 = (3.0 * k.s2 - f * k.s0) * inv / 3.0;
  const TorusField b0 = f + b2;
  const TorusField c0 = (k.K1 - f * f) / 3.0;
  const TorusField d0 = (f * f * f - f * (3.0 * k.K1)) / 27.0;

  MomentumPolynomial F;
  F.set_slice(3, 0, a0);
  F.set_slice(3, 2, a2);
  F.set_slice(2, 0, b0);
  F.set_slice(2, 2, b2);
  F.set_slice(1, 0, c0);
  F.set_slice(0, 0, d0);
  return F;
}

/// Quartic integral with G = K2 = K4 = K5 = 0.
inline MomentumPolynomial degree4_family(const FamilySpec& spec) {
  if (spec.degree != 4) throw PreconditionError("degree4_family needs degree 4");
  spec.validate();
  const auto& k = spec.constants;
  const TorusField inv = reciprocal(spec.lambda, spec.reciprocal_tol);
  const TorusField inv2 = inv * inv;
  const TorusField& f = spec.f1;
  const TorusField f2 = f * f;

  // a0 = (s3 + s2 L - L^2) / L^2
  const TorusField a0 = inv2 * k.s3 + inv * k.s2 - 1.0;
  const TorusField a4 = 1.0 + a0 - inv * k.s2;
  const TorusField a2 = 1.0 + a0 + a4;  // a2 - a0 - a4 = 1
  const TorusField b2 = (2.0 * k.s5 - f * k.s2) * inv / 2.0;
  const TorusField b0 = f + b2;
  const TorusField c2 = (16.0 * k.s6 - f * (4.0 * k.s5) + f2 * k.s2) * inv / 16.0;
  const TorusField c0 = c2 + (k.K1 - f2 * 1.5) / 4.0;
  const TorusField d0 = (k.K3 - f * (2.0 * k.K1) + f2 * f) / 16.0;
  const TorusField e0 = f * (-k.K3 / 64.0) + f2 * (k.K1 / 64.0) - f2 * f2 / 256.0;

  MomentumPolynomial F;
  F.set_slice(4, 0, a0);
  F.set_slice(4, 2, a2);
  F.set_slice(4, 4, a4);
  F.set_slice(3, 0, b0);
  F.set_slice(3, 2, b2);
  F.set_slice(2, 0, c0);
  F.set_slice(2, 2, c2);
  F.set_slice(1, 0, d0);
  F.set_slice(0, 0, e0);
  return F;
}

inline MomentumPolynomial build_family(const FamilySpec& spec) {
  switch (spec.degree) {
    case 3: return degree3_family(spec);
    case 4: return degree4_family(spec);
    default: break;
  }
  // Other degrees: the normalized power -F1^N.
  spec.validate();
  return -pow(linear_family(spec.f1, spec.degree).F1, spec.degree);
}

/// Right-hand side of the reduction identity, built from F1 and H alone.
inline MomentumPolynomial reduction_rhs(const FamilySpec& spec) {
  const auto& k = spec.constants;
  const MomentumPolynomial F1 = linear_family(spec.f1, spec.degree).F1;
  const MomentumPolynomial H = hamiltonian(spec.lambda, spec.reciprocal_tol);
  if (spec.degree == 3) {
    return -pow(F1, 3) + 2.0 * k.s0 * (H * F1) + 2.0 * k.s2 * H + (k.K1 / 3.0) * F1;
  }
  if (spec.degree == 4) {
    const MomentumPolynomial F1sq = F1 * F1;
    return -(F1sq * F1sq) + 4.0 * k.s3 * (H * H) + 2.0 * k.s2 * (H * F1sq) + 2.0 * k.s5 * (H * F1) +
           2.0 * k.s6 * H + (k.K1 / 4.0) * F1sq + (k.K3 / 16.0) * F1;
  }
  return -pow(F1, spec.degree);
}

/// Largest coefficient sup-norm of F minus the F1/H expression.
inline double identity_reduction_check(const MomentumPolynomial& F, const FamilySpec& spec) {
  if (F.degree() != spec.degree) {
    throw PreconditionError("integral degree " + std::to_string(F.degree()) +
                            " does not match family degree " + std::to_string(spec.degree));
  }
  return (F - reduction_rhs(spec)).sup_norm();
}

/// Adds a constant to one coefficient.  Keys name a coefficient either as
/// a<s>,<k> (slice indexing) or by the letter names of the degree-3/4
/// integrals (a0.., b0.., c0.., d0.., e0).
inline void perturb_coefficient(MomentumPolynomial& F, int degree, const std::string& key,
                                double delta) {
  int s = -1, k = -1;
  if (key.size() >= 4 && key[0] == 'a' && key.find(',') != std::string::npos) {
    s = std::stoi(key.substr(1, key.find(',') - 1));
    k = std::stoi(key.substr(key.find(',') + 1));
  } else if (key.size() >= 2 && key[0] >= 'a' && key[0] <= 'e') {
    s = degree - (key[0] - 'a');
    k = std::stoi(key.substr(1));
  }
  if (s < 0 || k < 0 || k > s || s > degree) {
    throw PreconditionError("unknown coefficient name '" + key + "' for degree " +
                            std::to_string(degree));
  }
  F.set_slice(s, k, F.slice_coeff(s, k) + TorusField::constant(delta));
}

}  // namespace mgflow
