#pragma once

// Conservation on a single energy level {H = C/2}.  With
// p1 = sqrt(C L) cos(phi), p2 = sqrt(C L) sin(phi) the condition dF/dt = 0
// becomes
//
//   F_x cos(phi) + F_y sin(phi)
//     + F_phi (L_y cos(phi) / (2L) - L_x sin(phi) / (2L) - Omega / sqrt(C L)) = 0,
//
// a trigonometric polynomial in phi of degree N + 1 whose Fourier modes are
// polynomials in t = sqrt(C).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mgflow/momentum_poly.hpp"

namespace mgflow {

/// phi-mode amplitudes of the level condition at every (x, y) grid point.
struct LevelModes {
  double level = 0.0;   // C
  int max_mode = 0;     // modes -max_mode..max_mode
  int n_grid = 0;       // (x, y) points per axis
  std::vector<Complex> amplitudes;  // [point * (2 max_mode + 1) + (k + max_mode)]

  int points() const { return n_grid * n_grid; }
  int modes() const { return 2 * max_mode + 1; }
  Complex at(int point, int k) const {
    return amplitudes[static_cast<std::size_t>(point) * modes() + (k + max_mode)];
  }
  double max_amplitude(int k) const {
    double m = 0.0;
    for (int p = 0; p < points(); ++p) m = std::max(m, std::abs(at(p, k)));
    return m;
  }
  double max_amplitude() const {
    double m = 0.0;
    for (const auto& a : amplitudes) m = std::max(m, std::abs(a));
    return m;
  }
};

/// Scale-aware vanishing threshold 1e-10 (1 + |F|_sup C^(N/2)).
inline double level_tolerance(const MomentumPolynomial& f, double level, double base = 1e-10) {
  const int n = std::max(f.degree(), 0);
  return base * (1.0 + f.sup_norm() * std::pow(level, 0.5 * n));
}

/// phi-grid size used to resolve the condition.
inline int phi_grid_size(int degree) { return 4 * (std::max(degree, 0) + 2); }

inline LevelModes level_condition_modes(const MomentumPolynomial& F, const TorusField& lambda,
                                        const TorusField& omega, double level, int n_grid = 16) {
  if (!(level > 0.0)) throw PreconditionError("energy level C must be positive");
  if (n_grid < 1) throw PreconditionError("grid resolution must be positive");
  const int N = std::max(F.degree(), 0);
  const int nphi = phi_grid_size(N);
  LevelModes out;
  out.level = level;
  out.max_mode = N + 1;
  out.n_grid = n_grid;
  out.amplitudes.assign(static_cast<std::size_t>(n_grid) * n_grid * out.modes(), Complex{});

  const GridField L = evaluate_on_grid(lambda, n_grid);
  const GridField Lx = evaluate_on_grid(lambda.dx(), n_grid);
  const GridField Ly = evaluate_on_grid(lambda.dy(), n_grid);
  const GridField Om = evaluate_on_grid(omega, n_grid);
  for (double v : L.values)
    if (!(v > 0.0)) throw DegenerateField("metric factor is not positive on the level grid");

  struct TermGrids {
    int m1, m2;
    GridField a, ax, ay;
  };
  std::vector<TermGrids> terms;
  for (const auto& [e, c] : F.terms())
    terms.push_back({e.m1, e.m2, evaluate_on_grid(c, n_grid), evaluate_on_grid(c.dx(), n_grid),
                     evaluate_on_grid(c.dy(), n_grid)});

  std::vector<double> cs(nphi), sn(nphi);
  for (int q = 0; q < nphi; ++q) {
    cs[q] = std::cos(kTwoPi * q / nphi);
    sn[q] = std::sin(kTwoPi * q / nphi);
  }
  const double sqrtC = std::sqrt(level);
  std::vector<double> cond(nphi);
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j) {
      const double lam = L.at(i, j), lx = Lx.at(i, j), ly = Ly.at(i, j), om = Om.at(i, j);
      const double rho = std::sqrt(level * lam);  // |p|
      for (int q = 0; q < nphi; ++q) {
        const double c = cs[q], s = sn[q];
        double fx = 0.0, fy = 0.0, fphi = 0.0;
        for (const auto& t : terms) {
          const int m = t.m1 + t.m2;
          const double rm = std::pow(rho, m);
          const double trig = std::pow(c, t.m1) * std::pow(s, t.m2);
          // d/dphi (cos^m1 sin^m2)
          double dtrig = 0.0;
          if (t.m1 > 0) dtrig -= t.m1 * std::pow(c, t.m1 - 1) * std::pow(s, t.m2 + 1);
          if (t.m2 > 0) dtrig += t.m2 * std::pow(c, t.m1 + 1) * std::pow(s, t.m2 - 1);
          const double a = t.a.at(i, j);
          // rho^m depends on (x, y) through L: d(rho^m) = (m/2) rho^m dL / L.
          fx += (t.ax.at(i, j) + a * 0.5 * m * lx / lam) * rm * trig;
          fy += (t.ay.at(i, j) + a * 0.5 * m * ly / lam) * rm * trig;
          fphi += a * rm * dtrig;
        }
        cond[q] = fx * c + fy * s + fphi * (ly * c / (2 * lam) - lx * s / (2 * lam) - om / (sqrtC * std::sqrt(lam)));
      }
      const int point = i * n_grid + j;
      for (int k = -out.max_mode; k <= out.max_mode; ++k) {
        Complex acc{};
        for (int q = 0; q < nphi; ++q) acc += cond[q] * std::polar(1.0, -kTwoPi * k * q / nphi);
        out.amplitudes[static_cast<std::size_t>(point) * out.modes() + (k + out.max_mode)] =
            acc / double(nphi);
      }
    }
  return out;
}

/// Least-squares polynomial in t = sqrt(C) for every (point, mode) series.
struct SqrtCFit {
  int degree = 0;
  double max_residual = 0.0;               // max |fit - sample|
  std::vector<double> max_coefficient;     // per power of t, max |coefficient|
  std::vector<double> mode_residual;       // per mode k + max_mode
  std::vector<std::vector<double>> mode_coefficient;  // [k + max_mode][power]
};

inline SqrtCFit sqrtC_polynomialize(const std::vector<LevelModes>& samples, int degree) {
  const int m = static_cast<int>(samples.size());
  if (m < degree + 1) {
    throw PreconditionError("need at least " + std::to_string(degree + 1) + " levels, got " +
                            std::to_string(m));
  }
  for (int a = 0; a < m; ++a) {
    if (!(samples[a].level > 0.0)) throw PreconditionError("levels must be positive");
    if (samples[a].amplitudes.size() != samples[0].amplitudes.size() ||
        samples[a].max_mode != samples[0].max_mode)
      throw PreconditionError("level samples have inconsistent shapes");
    for (int b = 0; b < a; ++b)
      if (samples[a].level == samples[b].level)
        throw PreconditionError("duplicate energy level " + std::to_string(samples[a].level));
  }
  const int modes = samples[0].modes();
  const int points = samples[0].points();
  const int cols = points * modes;

  Eigen::MatrixXd V(m, degree + 1);
  for (int r = 0; r < m; ++r) {
    const double t = std::sqrt(samples[r].level);
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= t) V(r, d) = p;
  }
  Eigen::MatrixXd Y(m, 2 * cols);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < cols; ++c) {
      Y(r, 2 * c) = samples[r].amplitudes[c].real();
      Y(r, 2 * c + 1) = samples[r].amplitudes[c].imag();
    }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  const Eigen::MatrixXd coeffs = qr.solve(Y);
  const Eigen::MatrixXd resid = V * coeffs - Y;

  SqrtCFit fit;
  fit.degree = degree;
  fit.max_coefficient.assign(degree + 1, 0.0);
  fit.mode_residual.assign(modes, 0.0);
  fit.mode_coefficient.assign(modes, std::vector<double>(degree + 1, 0.0));
  for (int c = 0; c < cols; ++c) {
    const int k = c % modes;
    for (int part = 0; part < 2; ++part) {
      const int col = 2 * c + part;
      const double res = resid.col(col).cwiseAbs().maxCoeff();
      fit.max_residual = std::max(fit.max_residual, res);
      fit.mode_residual[k] = std::max(fit.mode_residual[k], res);
      for (int d = 0; d <= degree; ++d) {
        const double v = std::abs(coeffs(d, col));
        fit.max_coefficient[d] = std::max(fit.max_coefficient[d], v);
        fit.mode_coefficient[k][d] = std::max(fit.mode_coefficient[k][d], v);
      }
    }
  }
  return fit;
}

struct LevelViolation {
  double level = 0.0;
  int mode = 0;
  double amplitude = 0.0;
  double tolerance = 0.0;
};

struct SplitOptions {
  int n_grid = 12;
  double base_tol = 1e-10;
  /// Accept floor((N + 2) / 2) levels instead of N + 2 (proven for N = 3, 4).
  bool sharp_level_count = false;
  std::vector<double> probe_levels;
};

struct SplitResult {
  bool all_levels_conserved = false;
  std::optional<LevelViolation> violation;
  int required_levels = 0;
  double max_given_amplitude = 0.0;
  double max_fit_coefficient = 0.0;  // interpolating polynomial through the given levels
  std::vector<std::pair<double, double>> probes;  // (level, max amplitude)
  bool probes_conserved = true;
};

inline int required_level_count(int degree, bool sharp) {
  return sharp ? std::max((degree + 2) / 2, 1) : degree + 2;
}

/// Decides conservation on all levels from the given ones: every mode must
/// vanish at each given level; the interpolating polynomial in sqrt(C) then
/// vanishes identically, and the probe levels confirm it.
inline SplitResult split_by_energy(const MomentumPolynomial& F, const TorusField& lambda,
                                   const TorusField& omega, const std::vector<double>& levels,
                                   const SplitOptions& opt = {}) {
  const int N = std::max(F.degree(), 0);
  SplitResult res;
  res.required_levels = required_level_count(N, opt.sharp_level_count);
  if (static_cast<int>(levels.size()) < res.required_levels) {
    throw PreconditionError("degree " + std::to_string(N) + " needs " +
                            std::to_string(res.required_levels) + " distinct levels, got " +
                            std::to_string(levels.size()));
  }
  std::vector<LevelModes> samples;
  for (double c : levels) samples.push_back(level_condition_modes(F, lambda, omega, c, opt.n_grid));

  for (const auto& s : samples) {
    const double tol = level_tolerance(F, s.level, opt.base_tol);
    res.max_given_amplitude = std::max(res.max_given_amplitude, s.max_amplitude());
    for (int k = -s.max_mode; k <= s.max_mode && !res.violation; ++k) {
      const double a = s.max_amplitude(k);
      if (a > tol) res.violation = LevelViolation{s.level, k, a, tol};
    }
  }
  const int fit_degree = std::min<int>(static_cast<int>(samples.size()) - 1, N + 1);
  const SqrtCFit fit = sqrtC_polynomialize(samples, fit_degree);
  for (double c : fit.max_coefficient) res.max_fit_coefficient = std::max(res.max_fit_coefficient, c);

  for (double c : opt.probe_levels) {
    const LevelModes pm = level_condition_modes(F, lambda, omega, c, opt.n_grid);
    const double a = pm.max_amplitude();
    res.probes.emplace_back(c, a);
    if (a > level_tolerance(F, c, opt.base_tol)) res.probes_conserved = false;
  }
  res.all_levels_conserved = !res.violation && res.probes_conserved;
  return res;
}

}  // namespace mgflow
