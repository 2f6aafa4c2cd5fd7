#pragma once

// The PDE system equivalent to {F, H} = 0 for a degree-N polynomial
// integral F = sum a_{s,k} p1^(s-k) p2^k and H = (p1^2 + p2^2) / (2 Lambda).
//
// Every bracket coefficient is kept multiplied through by 2 Lambda^2:
//
//   Mt_{s,k} = [(s-k-1) a_{s-1,k} + (s-k+1) a_{s-1,k-2}] Lambda_x
//            + [(k+1) a_{s-1,k+1} + (k-1) a_{s-1,k-1}] Lambda_y
//            + 2 Lambda [(a_{s-1,k})_x + (a_{s-1,k-1})_y]
//            + 2 Lambda Omega [(s-k+1) a_{s,k-1} - (k+1) a_{s,k+1}]
//
// with a_{m,n} = 0 outside 0 <= n <= m <= N.  Mt is polynomial in Lambda,
// so this path never divides.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mgflow/momentum_poly.hpp"

namespace mgflow {

// -- symbolic structure ---------------------------------------------------------

enum class TermOp {
  lambda_x,            // a Lambda_x
  lambda_y,            // a Lambda_y
  two_lambda_dx,       // 2 Lambda a_x
  two_lambda_dy,       // 2 Lambda a_y
  two_lambda_omega,    // 2 Lambda Omega a
};

/// coefficient * op(a_{s,k}).
struct CascadeTerm {
  int coefficient = 0;
  TermOp op = TermOp::lambda_x;
  int s = 0;
  int k = 0;
  auto operator<=>(const CascadeTerm&) const = default;
};

inline bool slice_in_range(int s, int k, int degree) { return s >= 0 && k >= 0 && k <= s && s <= degree; }

/// Nonzero terms of Mt_{s,k} for an integral of the given degree, sorted.
inline std::vector<CascadeTerm> cascade_terms(int s, int k, int degree) {
  std::map<std::tuple<TermOp, int, int>, int> acc;
  auto add = [&](int c, TermOp op, int ss, int kk) {
    if (c == 0 || !slice_in_range(ss, kk, degree)) return;
    acc[{op, ss, kk}] += c;
  };
  add(s - k - 1, TermOp::lambda_x, s - 1, k);
  add(s - k + 1, TermOp::lambda_x, s - 1, k - 2);
  add(k + 1, TermOp::lambda_y, s - 1, k + 1);
  add(k - 1, TermOp::lambda_y, s - 1, k - 1);
  add(1, TermOp::two_lambda_dx, s - 1, k);
  add(1, TermOp::two_lambda_dy, s - 1, k - 1);
  add(s - k + 1, TermOp::two_lambda_omega, s, k - 1);
  add(-(k + 1), TermOp::two_lambda_omega, s, k + 1);
  std::vector<CascadeTerm> out;
  for (const auto& [key, c] : acc)
    if (c != 0) out.push_back({c, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string format_term(const CascadeTerm& t) {
  std::ostringstream os;
  os << (t.coefficient < 0 ? "- " : "+ ") << std::abs(t.coefficient) << "*";
  const std::string a = "a[" + std::to_string(t.s) + "," + std::to_string(t.k) + "]";
  switch (t.op) {
    case TermOp::lambda_x: os << a << "*L_x"; break;
    case TermOp::lambda_y: os << a << "*L_y"; break;
    case TermOp::two_lambda_dx: os << "2L*d_x(" << a << ")"; break;
    case TermOp::two_lambda_dy: os << "2L*d_y(" << a << ")"; break;
    case TermOp::two_lambda_omega: os << "2L*Omega*" << a; break;
  }
  return os.str();
}

/// Human-readable listing of every nonzero Mt_{s,k}, one line each.
inline std::string emit_system(int degree) {
  std::ostringstream os;
  for (int s = degree + 1; s >= 0; --s)
    for (int k = 0; k <= s; ++k) {
      const auto terms = cascade_terms(s, k, degree);
      if (terms.empty()) continue;
      os << "M[" << s << "," << k << "] =";
      for (const auto& t : terms) os << " " << format_term(t);
      os << "\n";
    }
  return os.str();
}

// -- reports ---------------------------------------------------------------------

struct CascadeReport {
  int degree = 0;
  std::map<std::pair<int, int>, TorusField> M;  // (s, k) -> 2 Lambda^2 M_{s,k}
  std::map<int, TorusField> U, V;               // alternating sums of M over k
  std::map<int, TorusField> alpha, beta;        // j -> alpha_j, beta_j
  TorusField omega_reconstructed;               // (f_y + g_x) / N
  std::map<std::string, double> residual_norms;

  /// Max sup-norm over all M entries.
  double max_bracket_residual() const {
    double m = 0.0;
    for (const auto& [key, f] : M) m = std::max(m, sup_norm(f));
    return m;
  }
};

namespace detail {
struct CascadeInputs {
  TorusField lambda, lambda_x, lambda_y, two_lambda, two_lambda_omega;
  CascadeInputs(const TorusField& lambda_, const TorusField& omega)
      : lambda(lambda_),
        lambda_x(lambda_.dx()),
        lambda_y(lambda_.dy()),
        two_lambda(lambda_ * 2.0),
        two_lambda_omega(lambda_ * omega * 2.0) {}
};

inline void check_metric(const TorusField& lambda) {
  if (lambda.is_zero()) throw DegenerateField("metric factor is identically zero");
  const GridField g = evaluate_on_grid(lambda, dealiased_resolution(lambda.bandwidth()));
  for (double v : g.values)
    if (!(v > 0.0)) throw DegenerateField("metric factor is not positive on the grid");
}
}  // namespace detail

/// Fills report.M with 2 Lambda^2 M_{s,k}, 0 <= k <= s <= N + 1.
inline CascadeReport bracket_coefficients(const MomentumPolynomial& f, const TorusField& lambda,
                                          const TorusField& omega) {
  detail::check_metric(lambda);
  const int n = std::max(f.degree(), 0);
  const detail::CascadeInputs in(lambda, omega);
  CascadeReport rep;
  rep.degree = n;
  std::map<std::pair<int, int>, TorusField> dx_cache, dy_cache;
  auto dx = [&](int s, int k) -> const TorusField& {
    auto [it, fresh] = dx_cache.try_emplace({s, k});
    if (fresh) it->second = f.slice_coeff(s, k).dx();
    return it->second;
  };
  auto dy = [&](int s, int k) -> const TorusField& {
    auto [it, fresh] = dy_cache.try_emplace({s, k});
    if (fresh) it->second = f.slice_coeff(s, k).dy();
    return it->second;
  };
  for (int s = 0; s <= n + 1; ++s)
    for (int k = 0; k <= s; ++k) {
      TorusField lx, ly, dxs, omega_part;
      for (const auto& t : cascade_terms(s, k, n)) {
        const double c = t.coefficient;
        switch (t.op) {
          case TermOp::lambda_x: lx += f.slice_coeff(t.s, t.k) * c; break;
          case TermOp::lambda_y: ly += f.slice_coeff(t.s, t.k) * c; break;
          case TermOp::two_lambda_dx: dxs += dx(t.s, t.k) * c; break;
          case TermOp::two_lambda_dy: dxs += dy(t.s, t.k) * c; break;
          case TermOp::two_lambda_omega: omega_part += f.slice_coeff(t.s, t.k) * c; break;
        }
      }
      TorusField m = lx * in.lambda_x + ly * in.lambda_y + in.two_lambda * dxs +
                     in.two_lambda_omega * omega_part;
      rep.M[{s, k}] = std::move(m);
    }
  for (int s = 0; s <= n + 1; ++s) {
    TorusField u, v;
    for (int k = 0; k <= s; ++k) {
      const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
      (k % 2 == 0 ? u : v) += rep.M[{s, k}] * sign;
    }
    rep.U[s] = std::move(u);
    rep.V[s] = std::move(v);
  }
  return rep;
}

/// alpha_j = a_{N-j,0} - a_{N-j,2} + ..., beta_j = a_{N-j,1} - a_{N-j,3} + ...
inline std::pair<std::map<int, TorusField>, std::map<int, TorusField>> alpha_beta(
    const MomentumPolynomial& f, int degree = -1) {
  const int n = degree < 0 ? f.degree() : degree;
  std::map<int, TorusField> alpha, beta;
  for (int j = 0; j <= n; ++j) {
    const int s = n - j;
    TorusField a, b;
    for (int k = 0; k <= s; ++k) {
      const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
      (k % 2 == 0 ? a : b) += f.slice_coeff(s, k) * sign;
    }
    alpha[j] = std::move(a);
    beta[j] = std::move(b);
  }
  return {std::move(alpha), std::move(beta)};
}

/// Sup-norm residuals of the alpha/beta cascade, tagged eq_5_2_j<j>,
/// eq_5_3_j<j>, eq_5_4_fx_gy, eq_5_4_omega, eq_5_4_lambda.
inline void cascade_residuals(CascadeReport& rep, const MomentumPolynomial& f,
                              const TorusField& lambda, const TorusField& omega) {
  const int n = rep.degree;
  auto [alpha, beta] = alpha_beta(f, n);
  rep.alpha = alpha;
  rep.beta = beta;
  if (n < 1) return;
  const TorusField& ff = alpha[1];
  const TorusField& gg = beta[1];
  const TorusField h = ff.dy() + gg.dx();
  const double nn = n;
  for (int j = 1; j <= n; ++j) {
    const double w = n + 1 - j;
    const TorusField r2 = alpha[j].dx() * nn - beta[j].dy() * nn - beta[j - 1] * h * w;
    const TorusField r3 = alpha[j].dy() * nn + beta[j].dx() * nn + alpha[j - 1] * h * w;
    rep.residual_norms["eq_5_2_j" + std::to_string(j)] = sup_norm(r2);
    rep.residual_norms["eq_5_3_j" + std::to_string(j)] = sup_norm(r3);
  }
  rep.omega_reconstructed = h / nn;
  rep.residual_norms["eq_5_4_fx_gy"] = sup_norm(ff.dx() - gg.dy());
  rep.residual_norms["eq_5_4_omega"] = sup_norm(omega - rep.omega_reconstructed);
  rep.residual_norms["eq_5_4_lambda"] =
      sup_norm((alpha[n - 1] * lambda).dx() + (beta[n - 1] * lambda).dy());
  rep.residual_norms["beta_N"] = sup_norm(beta[n]);
}

/// Full report: bracket coefficients, cascade residuals and the maximum
/// bracket residual under the tag "bracket_max".
inline CascadeReport analyze_cascade(const MomentumPolynomial& f, const TorusField& lambda,
                                     const TorusField& omega) {
  CascadeReport rep = bracket_coefficients(f, lambda, omega);
  cascade_residuals(rep, f, lambda, omega);
  rep.residual_norms["bracket_max"] = rep.max_bracket_residual();
  return rep;
}

// -- Kolokol'tsov constants ---------------------------------------------------

struct KolokoltsovResult {
  bool harmonic = false;  // both leading alternating sums have zero Laplacian
  bool constant = false;
  double a0 = 0.0;        // A0 = -alpha_0
  double a1 = 0.0;        // A1 = -beta_0
  double nonconstant_mass = 0.0;
  double laplacian_norm = 0.0;
};

/// Tests that the leading alternating sums are harmonic, hence constant, and
/// returns A0 = -alpha_0, A1 = -beta_0 (for degree 3: a2 - a0, a3 - a1; for
/// degree 4: a2 - a0 - a4, a3 - a1).
inline KolokoltsovResult kolokoltsov_check(const MomentumPolynomial& f,
                                           double eps = kDefaultConstancyEps) {
  const int n = f.degree();
  auto [alpha, beta] = alpha_beta(f, n);
  const TorusField a = -alpha[0];
  const TorusField b = -beta[0];
  KolokoltsovResult r;
  r.laplacian_norm = std::max(a.laplacian().max_amplitude(), b.laplacian().max_amplitude());
  r.harmonic = r.laplacian_norm <= eps * (1.0 + std::abs(a.mean()) + std::abs(b.mean()));
  const auto ca = constancy_test(a, eps);
  const auto cb = constancy_test(b, eps);
  r.constant = ca.constant && cb.constant;
  r.a0 = ca.value;
  r.a1 = cb.value;
  r.nonconstant_mass = ca.nonconstant_mass + cb.nonconstant_mass;
  return r;
}

// -- conserved combinations -----------------------------------------------------

struct ConservedCombination {
  std::string name;      // "K1", ...
  std::string equation;  // "eq_3_20a", ...
  TorusField field;
  std::optional<double> constant_value;
  double max_nonconstant = 0.0;
};

/// Builds the degree-3 combinations (K1, K2, K3 and the constant G of g) or
/// the degree-4 combinations (K1 ... K5).  Later combinations use the mean
/// values of earlier constants.
inline std::vector<ConservedCombination> conserved_combinations(const MomentumPolynomial& f,
                                                                double eps = kDefaultConstancyEps) {
  const int n = f.degree();
  if (n != 3 && n != 4) {
    throw PreconditionError("conserved combinations are defined for degree 3 and 4 only, got " +
                            std::to_string(n));
  }
  auto [alpha, beta] = alpha_beta(f, n);
  const TorusField& ff = alpha[1];
  const TorusField& gg = beta[1];
  std::vector<ConservedCombination> out;
  auto push = [&](std::string name, std::string eq, TorusField field) -> double {
    const auto c = constancy_test(field, eps);
    ConservedCombination cc{std::move(name), std::move(eq), std::move(field), std::nullopt,
                            c.max_nonconstant};
    if (c.constant) cc.constant_value = c.value;
    out.push_back(std::move(cc));
    return c.value;
  };

  const TorusField f2 = ff * ff, g2 = gg * gg, fg = ff * gg;
  if (n == 3) {
    const TorusField& c0 = f.slice_coeff(1, 0);
    const TorusField& c1 = f.slice_coeff(1, 1);
    const double k1 = push("K1", "eq_3_20a", c0 * 3.0 + f2 - g2);
    const double k2 = push("K2", "eq_3_20b", c1 * 3.0 + fg * 2.0);
    push("K3", "eq_3_22", gg * k1 + ff * k2 + g2 * gg / 3.0 - gg * f2);
    push("G", "g_constant", gg);
  } else {
    const TorusField c0c2 = f.slice_coeff(2, 0) - f.slice_coeff(2, 2);
    const TorusField& c1 = f.slice_coeff(2, 1);
    const TorusField& d0 = f.slice_coeff(1, 0);
    const TorusField& d1 = f.slice_coeff(1, 1);
    const double k1 = push("K1", "eq_4_13", c0c2 * 4.0 + (f2 - g2) * 1.5);
    const double k2 = push("K2", "eq_4_14", c1 * 4.0 + fg * 3.0);
    const double k3 =
        push("K3", "eq_4_15", d0 * 16.0 + ff * (2.0 * k1) - gg * (2.0 * k2) - f2 * ff + ff * g2 * 3.0);
    const double k4 =
        push("K4", "eq_4_16", d1 * 16.0 + gg * (2.0 * k1) + ff * (2.0 * k2) + g2 * gg - f2 * gg * 3.0);
    push("K5", "eq_4_18",
         fg * (f2 - g2) - fg * (2.0 * k1) + (f2 - g2) * k2 + gg * k3 + ff * k4);
    push("G", "g_constant", gg);
  }
  return out;
}

// -- printed degree-3 and degree-4 systems ----------------------------------------

/// Residuals of the degree-3 equations written directly in terms of
/// a0..a3, b0..b2, c0, c1, d0, f = b0 - b2, g = b1.  Equations that assume
/// the normalization A0 = 1, A1 = 0 are included as printed.
inline std::map<std::string, double> degree3_equation_residuals(const MomentumPolynomial& F,
                                                                const TorusField& L,
                                                                const TorusField& Om) {
  if (F.degree() > 3) throw PreconditionError("degree-3 system needs degree <= 3");
  auto a = [&](int i) -> const TorusField& { return F.slice_coeff(3, i); };
  auto b = [&](int i) -> const TorusField& { return F.slice_coeff(2, i); };
  const TorusField& c0 = F.slice_coeff(1, 0);
  const TorusField& c1 = F.slice_coeff(1, 1);
  const TorusField& d0 = F.slice_coeff(0, 0);
  const TorusField Lx = L.dx(), Ly = L.dy();
  const TorusField f = b(0) - b(2), g = b(1);
  const TorusField h = f.dy() + g.dx();
  std::map<std::string, double> r;
  r["eq_3_1"] = sup_norm(a(1) * Ly + a(0) * Lx * 3.0 + L * a(0).dx() * 2.0);
  r["eq_3_2"] = sup_norm(a(2) * Ly + a(1) * Lx + L * (a(0).dy() + a(1).dx()));
  r["eq_3_3"] = sup_norm((a(1) + a(3) * 3.0) * Ly + (a(0) * 3.0 + a(2)) * Lx +
                         L * (a(1).dy() + a(2).dx()) * 2.0);
  r["eq_3_4"] = sup_norm(a(2) * Ly + a(1) * Lx + L * (a(2).dy() + a(3).dx()));
  r["eq_3_5"] = sup_norm(a(3) * Ly * 3.0 + a(2) * Lx + L * a(3).dy() * 2.0);
  r["eq_3_6"] = sup_norm(a(1) * Ly + L * a(0).dx() * 2.0 + a(0) * Lx * 3.0);
  r["eq_3_7"] = sup_norm((1.0 + a(0)) * Ly + L * (a(0).dy() + a(1).dx()) + a(1) * Lx);
  r["eq_3_8"] = sup_norm(a(1) * Ly * 3.0 + L * a(1).dy() * 2.0 + (1.0 + a(0)) * Lx);
  r["eq_3_9"] = sup_norm(g * Ly + (b(2) + f) * Lx * 2.0 + L * (b(2).dx() + f.dx() - a(1) * Om) * 2.0);
  r["eq_3_10"] = sup_norm(g * Lx + b(2) * Ly * 2.0 +
                          L * (g.dx() + f.dy() + b(2).dy() + (a(0) - 2.0) * Om) * 2.0);
  r["eq_3_11"] = sup_norm(g * Ly + (b(2) + f) * Lx * 2.0 + L * (b(2).dx() + g.dy() - a(1) * Om) * 2.0);
  r["eq_3_12"] = sup_norm(g * Lx + b(2) * Ly * 2.0 + L * (b(2).dy() + (a(0) + 1.0) * Om) * 2.0);
  r["eq_3_13"] = sup_norm(Om - h / 3.0);
  r["eq_3_14"] = sup_norm(f.dx() - g.dy());
  r["eq_3_15"] = sup_norm(c0.dx() * 3.0 - c1.dy() * 3.0 - g * h * 2.0);
  r["eq_3_16"] = sup_norm(c0.dy() * 3.0 + c1.dx() * 3.0 + f * h * 2.0);
  r["eq_3_17"] = sup_norm((c0 * L).dx() + (c1 * L).dy());
  r["eq_3_18"] = sup_norm(d0.dx() * 3.0 - c1 * h);
  r["eq_3_19"] = sup_norm(d0.dy() * 3.0 + c0 * h);
  return r;
}

/// Residuals of the printed degree-4 equations with f = b0 - b2, g = b1 - b3.
inline std::map<std::string, double> degree4_equation_residuals(const MomentumPolynomial& F,
                                                                const TorusField& L,
                                                                const TorusField& Om) {
  if (F.degree() > 4) throw PreconditionError("degree-4 system needs degree <= 4");
  auto a = [&](int i) -> const TorusField& { return F.slice_coeff(4, i); };
  auto b = [&](int i) -> const TorusField& { return F.slice_coeff(3, i); };
  auto c = [&](int i) -> const TorusField& { return F.slice_coeff(2, i); };
  const TorusField& d0 = F.slice_coeff(1, 0);
  const TorusField& d1 = F.slice_coeff(1, 1);
  const TorusField& e0 = F.slice_coeff(0, 0);
  const TorusField Lx = L.dx(), Ly = L.dy();
  const TorusField f = b(0) - b(2), g = b(1) - b(3);
  const TorusField h = f.dy() + g.dx();
  const TorusField one_a0_a4 = 1.0 + a(0) + a(4);
  std::map<std::string, double> r;
  r["eq_4_1"] = sup_norm(a(1) * Ly + L * a(0).dx() * 2.0 + a(0) * Lx * 4.0);
  r["eq_4_2"] = sup_norm(one_a0_a4 * Ly * 2.0 + L * (a(0).dy() + a(1).dx()) * 2.0 + a(1) * Lx * 3.0);
  r["eq_4_3"] = sup_norm(one_a0_a4 * Lx * 2.0 + L * (a(1).dy() + a(4).dx()) * 2.0 + a(1) * Ly * 3.0);
  r["eq_4_4"] = sup_norm(L * a(4).dy() * 2.0 + a(1) * Lx + a(4) * Ly * 4.0);
  r["eq_4_omega"] = sup_norm(Om - h / 4.0);
  r["eq_4_5"] = sup_norm(f.dx() - g.dy());
  r["eq_4_6"] = sup_norm((c(0) - c(2)).dx() * 4.0 - c(1).dy() * 4.0 - g * h * 3.0);
  r["eq_4_7"] = sup_norm((c(0) - c(2)).dy() * 4.0 + c(1).dx() * 4.0 + f * h * 3.0);
  r["eq_4_8"] = sup_norm(d0.dx() * 2.0 - d1.dy() * 2.0 - c(1) * h);
  r["eq_4_9"] = sup_norm(d0.dy() * 2.0 + d1.dx() * 2.0 + (c(0) - c(2)) * h);
  r["eq_4_10"] = sup_norm((d0 * L).dx() + (d1 * L).dy());
  r["eq_4_11"] = sup_norm(e0.dx() * 4.0 - d1 * h);
  r["eq_4_12"] = sup_norm(e0.dy() * 4.0 + d0 * h);
  return r;
}

}  // namespace mgflow
