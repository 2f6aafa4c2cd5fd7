#pragma once

// Polynomials A_n, B_n in (f, g) and the closed-form solution of the
// alpha/beta cascade
//
//   N lap(alpha_j) + (N+1-j) ([alpha_{j-1} h]_y - [beta_{j-1} h]_x) = 0,
//   N lap(beta_j)  + (N+1-j) ([alpha_{j-1} h]_x + [beta_{j-1} h]_y) = 0,
//
// h = f_y + g_x, alpha_0 = -1, beta_0 = 0, alpha_1 = f, beta_1 = g.
//
// With Z_n = A_n + i B_n = (f + i g)^(n+1) / (n+1)!, the operator on the
// right maps Z_n to lap(Z_{n+1}) and a constant kappa to lap(kappa Z_0).
// Hence W_j = alpha_j + i beta_j is a complex combination of the Z_n and
//
//   W_j = (a_j + i b_j) / N - (N+1-j) / N * shift(W_{j-1}),
//
// where shift sends kappa -> kappa Z_0 and Z_n -> Z_{n+1}.

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "mgflow/torus_field.hpp"

namespace mgflow {

struct ABPair {
  TorusField A;
  TorusField B;
};

namespace detail {
inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}
}  // namespace detail

/// A_n, B_n by their binomial sums.
inline ABPair poly_AB(int n, const TorusField& f, const TorusField& g) {
  if (n < 0) throw PreconditionError("A_n, B_n need n >= 0");
  std::vector<TorusField> fp{TorusField::constant(1.0)}, gp{TorusField::constant(1.0)};
  for (int i = 1; i <= n + 1; ++i) {
    fp.push_back(fp.back() * f);
    gp.push_back(gp.back() * g);
  }
  const double inv_fact = 1.0 / detail::factorial(n + 1);
  ABPair r;
  for (int k = 0; k <= (n + 1) / 2; ++k) {
    const double c = (k % 2 == 0 ? 1.0 : -1.0) * detail::binomial(n + 1, 2 * k);
    r.A += fp[n - 2 * k + 1] * gp[2 * k] * (c * inv_fact);
  }
  for (int k = 1; k <= (n + 2) / 2; ++k) {
    const double c = (k % 2 == 1 ? 1.0 : -1.0) * detail::binomial(n + 1, 2 * k - 1);
    r.B += fp[n - 2 * k + 2] * gp[2 * k - 1] * (c * inv_fact);
  }
  return r;
}

/// A_n, B_n as real and imaginary parts of (f + i g)^(n+1) / (n+1)!,
/// computed by repeated complex multiplication of real field pairs.
inline ABPair poly_AB_complex(int n, const TorusField& f, const TorusField& g) {
  if (n < 0) throw PreconditionError("A_n, B_n need n >= 0");
  TorusField re = f, im = g;
  for (int i = 1; i <= n; ++i) {
    TorusField nre = re * f - im * g;
    TorusField nim = re * g + im * f;
    re = std::move(nre);
    im = std::move(nim);
  }
  const double inv_fact = 1.0 / detail::factorial(n + 1);
  return {re * inv_fact, im * inv_fact};
}

/// Both routes; throws if they disagree by more than `tol` (sup-norm).
inline ABPair poly_AB_checked(int n, const TorusField& f, const TorusField& g, double tol = 1e-12) {
  ABPair s = poly_AB(n, f, g);
  const ABPair c = poly_AB_complex(n, f, g);
  const double scale = 1.0 + sup_norm(s.A) + sup_norm(s.B);
  const double d = std::max(sup_norm(s.A - c.A), sup_norm(s.B - c.B));
  if (d > tol * scale) {
    throw Error("A_" + std::to_string(n) + "/B_" + std::to_string(n) +
                " binomial and complex forms disagree by " + std::to_string(d));
  }
  return s;
}

struct RecurrenceResiduals {
  double a_relation = 0.0;  // A_n h - (A_{n+1})_y - (B_{n+1})_x
  double b_relation = 0.0;  // B_n h + (A_{n+1})_x - (B_{n+1})_y
  double ay_identity = 0.0; // (A_{n+1})_y - (A_n f_y - B_n g_y)
  double bx_identity = 0.0; // (B_{n+1})_x - (B_n f_x + A_n g_x)
};

inline void require_compatible(const TorusField& f, const TorusField& g, double tol = 1e-12) {
  const double d = sup_norm(f.dx() - g.dy());
  if (d > tol * (1.0 + sup_norm(f) + sup_norm(g))) {
    throw PreconditionError("f_x - g_y does not vanish (sup " + std::to_string(d) + ")");
  }
}

inline RecurrenceResiduals lemma4_check(int n, const TorusField& f, const TorusField& g) {
  require_compatible(f, g);
  const ABPair cur = poly_AB(n, f, g);
  const ABPair next = poly_AB(n + 1, f, g);
  const TorusField h = f.dy() + g.dx();
  RecurrenceResiduals r;
  r.a_relation = sup_norm(cur.A * h - next.A.dy() - next.B.dx());
  r.b_relation = sup_norm(cur.B * h + next.A.dx() - next.B.dy());
  r.ay_identity = sup_norm(next.A.dy() - (cur.A * f.dy() - cur.B * g.dy()));
  r.bx_identity = sup_norm(next.B.dx() - (cur.B * f.dx() + cur.A * g.dx()));
  return r;
}

/// c_j = (-1)^j (N-j)(N-j+1)...(N-1) / N^j; c_0 = 1.
inline double cascade_c(int N, int j) {
  double r = 1.0;
  for (int i = 1; i <= j; ++i) r *= -double(N - i) / N;
  return r;
}

/// Free constants a_j, b_j of the integrated cascade, j = 2..N.
struct CascadeCoefficients {
  int N = 0;
  std::map<int, double> a;
  std::map<int, double> b;

  double a_at(int j) const { auto it = a.find(j); return it == a.end() ? 0.0 : it->second; }
  double b_at(int j) const { auto it = b.find(j); return it == b.end() ? 0.0 : it->second; }
};

/// Symbolic form of W_j: kappa + sum_n mu[n] Z_n.
struct CascadeSymbol {
  std::complex<double> kappa;             // (a_j + i b_j) / N
  std::vector<std::complex<double>> mu;   // mu[n] = m_n(j) + i n_n(j)
};

struct ClosedFormCascade {
  int N = 0;
  std::vector<CascadeSymbol> symbols;  // j = 0..N
  std::vector<TorusField> alpha, beta; // j = 0..N

  /// m_i(j) table, i = 0..j-3.
  double m(int i, int j) const { return symbols.at(j).mu.at(i).real(); }
  double n(int i, int j) const { return symbols.at(j).mu.at(i).imag(); }
};

/// Builds the symbols W_0..W_N (no fields).
inline std::vector<CascadeSymbol> cascade_symbols(const CascadeCoefficients& coeffs) {
  const int N = coeffs.N;
  if (N < 1) throw PreconditionError("cascade needs N >= 1");
  std::vector<CascadeSymbol> w(N + 1);
  w[0].kappa = -1.0;
  for (int j = 1; j <= N; ++j) {
    const double scale = -double(N + 1 - j) / N;
    CascadeSymbol& cur = w[j];
    const CascadeSymbol& prev = w[j - 1];
    cur.kappa = j == 1 ? 0.0 : std::complex<double>(coeffs.a_at(j), coeffs.b_at(j)) / double(N);
    cur.mu.assign(j, 0.0);
    cur.mu[0] = scale * prev.kappa;
    for (std::size_t n = 0; n < prev.mu.size(); ++n) cur.mu[n + 1] += scale * prev.mu[n];
  }
  return w;
}

/// alpha_j, beta_j as fields from the symbols and A_n, B_n.
inline ClosedFormCascade cascade_closed_form(const CascadeCoefficients& coeffs, const TorusField& f,
                                             const TorusField& g) {
  require_compatible(f, g);
  ClosedFormCascade out;
  out.N = coeffs.N;
  out.symbols = cascade_symbols(coeffs);
  std::vector<ABPair> ab;
  for (int n = 0; n < coeffs.N; ++n) ab.push_back(poly_AB(n, f, g));
  for (const auto& sym : out.symbols) {
    TorusField al = TorusField::constant(sym.kappa.real());
    TorusField be = TorusField::constant(sym.kappa.imag());
    for (std::size_t n = 0; n < sym.mu.size(); ++n) {
      const double m = sym.mu[n].real(), q = sym.mu[n].imag();
      if (m != 0.0) {
        al += ab[n].A * m;
        be += ab[n].B * m;
      }
      if (q != 0.0) {
        al -= ab[n].B * q;
        be += ab[n].A * q;
      }
    }
    out.alpha.push_back(std::move(al));
    out.beta.push_back(std::move(be));
  }
  return out;
}

/// Sup-norm residuals of the second-order cascade for j = 1..N, keyed
/// eq_6_1_j<j> and eq_6_2_j<j>.
inline std::map<std::string, double> second_order_cascade_residuals(const ClosedFormCascade& c,
                                                                    const TorusField& f,
                                                                    const TorusField& g) {
  const TorusField h = f.dy() + g.dx();
  const int N = c.N;
  std::map<std::string, double> r;
  for (int j = 1; j <= N; ++j) {
    const TorusField ah = c.alpha[j - 1] * h;
    const TorusField bh = c.beta[j - 1] * h;
    const double w = N + 1 - j;
    r["eq_6_1_j" + std::to_string(j)] =
        sup_norm(c.alpha[j].laplacian() * double(N) + (ah.dy() - bh.dx()) * w);
    r["eq_6_2_j" + std::to_string(j)] =
        sup_norm(c.beta[j].laplacian() * double(N) + (ah.dx() + bh.dy()) * w);
  }
  return r;
}

/// One integration step done spectrally: alpha_j from alpha_{j-1}, beta_{j-1}
/// by inverting the Laplacian on nonzero modes.  The mean is taken from
/// `closed`, so the result is comparable mode for mode.
inline ABPair spectral_cascade_step(const ClosedFormCascade& closed, int j, const TorusField& f,
                                    const TorusField& g) {
  const int N = closed.N;
  const TorusField h = f.dy() + g.dx();
  const TorusField ah = closed.alpha[j - 1] * h;
  const TorusField bh = closed.beta[j - 1] * h;
  const double w = -double(N + 1 - j) / N;
  const TorusField rhs_a = (ah.dy() - bh.dx()) * w;
  const TorusField rhs_b = (ah.dx() + bh.dy()) * w;
  return {rhs_a.inverse_laplacian(closed.alpha[j].mean()),
          rhs_b.inverse_laplacian(closed.beta[j].mean())};
}

/// The j = 2 and j = 3 expressions in explicit form.
inline ABPair explicit_alpha_beta(int j, int N, double a2, double b2, double a3, double b3,
                                     const TorusField& f, const TorusField& g) {
  const double n = N;
  if (j == 2) {
    const ABPair A1 = poly_AB(1, f, g);
    return {a2 / n - (n - 1) / n * A1.A, b2 / n - (n - 1) / n * A1.B};
  }
  if (j == 3) {
    const ABPair A0 = poly_AB(0, f, g), A2 = poly_AB(2, f, g);
    return {a3 / n - (n - 2) / (n * n) * (A0.A * a2 - A0.B * b2) + (n - 2) * (n - 1) / (n * n) * A2.A,
            b3 / n - (n - 2) / (n * n) * (A0.B * a2 + A0.A * b2) + (n - 2) * (n - 1) / (n * n) * A2.B};
  }
  throw PreconditionError("explicit expressions exist for j = 2, 3 only");
}

}  // namespace mgflow
