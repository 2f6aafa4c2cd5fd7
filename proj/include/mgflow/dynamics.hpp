#pragma once

// The magnetic geodesic flow on a fixed energy level in (x, y, phi):
//
//   x'   = sqrt(C / L) cos(phi)
//   y'   = sqrt(C / L) sin(phi)
//   phi' = sqrt(C) (L_y cos(phi) - L_x sin(phi)) / (2 L^(3/2)) - Omega / L
//
// plus drift diagnostics for polynomial integrals and a crossing detector
// for straight-line characteristics of beta(g) g_y - alpha(g) g_x = 0.

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mgflow/momentum_poly.hpp"

namespace mgflow {

using FlowState = std::array<double, 3>;  // x, y, phi (x, y unwrapped)

/// Fields needed by the right-hand side, evaluated by spectral summation.
class FlowField {
 public:
  FlowField(TorusField lambda, TorusField omega, double level)
      : lambda_(std::move(lambda)),
        lambda_x_(lambda_.dx()),
        lambda_y_(lambda_.dy()),
        omega_(std::move(omega)),
        level_(level),
        sqrt_level_(std::sqrt(level)) {
    if (!(level > 0.0)) throw PreconditionError("energy level C must be positive");
  }

  double level() const { return level_; }
  const TorusField& lambda() const { return lambda_; }

  void operator()(const FlowState& s, FlowState& ds, double /*t*/) const {
    const double L = lambda_.value(s[0], s[1]);
    if (!(L > 0.0)) throw DegenerateField("metric factor not positive along trajectory");
    const double Lx = lambda_x_.value(s[0], s[1]);
    const double Ly = lambda_y_.value(s[0], s[1]);
    const double Om = omega_.value(s[0], s[1]);
    const double c = std::cos(s[2]), sn = std::sin(s[2]);
    const double speed = std::sqrt(level_ / L);
    ds[0] = speed * c;
    ds[1] = speed * sn;
    ds[2] = sqrt_level_ * (Ly * c - Lx * sn) / (2.0 * L * std::sqrt(L)) - Om / L;
  }

  /// Momenta on the level at (x, y, phi).
  PhasePoint phase_point(const FlowState& s) const {
    const double rho = std::sqrt(level_ * lambda_.value(s[0], s[1]));
    return {s[0], s[1], rho * std::cos(s[2]), rho * std::sin(s[2])};
  }

 private:
  TorusField lambda_, lambda_x_, lambda_y_, omega_;
  double level_, sqrt_level_;
};

struct StepControl {
  enum class Mode { adaptive, fixed };
  Mode mode = Mode::adaptive;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double step = 1e-2;          // initial step (adaptive) or step size (fixed)
  double sample_interval = 0.1;
  std::size_t max_steps = 10'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FlowState> states;  // x, y reduced mod 2 pi
  double level = 0.0;
  std::vector<FlowState> unwrapped;
};

/// Adaptive Dormand-Prince (or fixed-step RK4) integration to time T.
inline Trajectory integrate_flow(const FlowField& field, const FlowState& start, double T,
                                 const StepControl& ctl = {}) {
  namespace odeint = boost::numeric::odeint;
  if (!(T > 0.0)) throw PreconditionError("integration time must be positive");
  if (!(ctl.sample_interval > 0.0)) throw PreconditionError("sample interval must be positive");
  std::vector<double> times;
  const auto n_samples = static_cast<std::size_t>(std::ceil(T / ctl.sample_interval - 1e-9));
  for (std::size_t i = 0; i <= n_samples; ++i)
    times.push_back(std::min(T, static_cast<double>(i) * ctl.sample_interval));
  if (times.back() < T) times.push_back(T);

  Trajectory traj;
  traj.level = field.level();
  FlowState state = start;
  auto observer = [&](const FlowState& s, double t) {
    traj.times.push_back(t);
    traj.unwrapped.push_back(s);
    traj.states.push_back({PhasePoint::reduce(s[0]), PhasePoint::reduce(s[1]), s[2]});
  };
  auto system = [&field](const FlowState& s, FlowState& ds, double t) { field(s, ds, t); };

  try {
    if (ctl.mode == StepControl::Mode::fixed) {
      odeint::runge_kutta4<FlowState> stepper;
      odeint::integrate_times(stepper, system, state, times.begin(), times.end(), ctl.step, observer);
    } else {
      auto stepper = odeint::make_dense_output(ctl.abs_tol, ctl.rel_tol,
                                               odeint::runge_kutta_dopri5<FlowState>());
      odeint::integrate_times(stepper, system, state, times.begin(), times.end(), ctl.step, observer,
                              odeint::max_step_checker(ctl.max_steps));
    }
  } catch (const odeint::step_adjustment_error& e) {
    std::ostringstream os;
    os << "step size underflow near t=" << (traj.times.empty() ? 0.0 : traj.times.back())
       << " state=(" << state[0] << ", " << state[1] << ", " << state[2] << "): " << e.what();
    throw StepUnderflow(os.str());
  } catch (const odeint::no_progress_error& e) {
    std::ostringstream os;
    os << "no progress near t=" << (traj.times.empty() ? 0.0 : traj.times.back()) << " state=("
       << state[0] << ", " << state[1] << ", " << state[2] << "): " << e.what();
    throw StepUnderflow(os.str());
  }
  return traj;
}

/// Values of F along the trajectory, with p = sqrt(C L) (cos phi, sin phi).
inline std::vector<double> integral_series(const FlowField& field, const Trajectory& traj,
                                           const MomentumPolynomial& F) {
  std::vector<double> v;
  v.reserve(traj.states.size());
  for (const auto& s : traj.states) v.push_back(evaluate_phase(F, field.phase_point(s)));
  return v;
}

/// max_t |F(t) - F(0)| for every integral.
inline std::vector<double> drift_report(const FlowField& field, const Trajectory& traj,
                                        const std::vector<MomentumPolynomial>& integrals) {
  std::vector<double> out;
  for (const auto& F : integrals) {
    const auto v = integral_series(field, traj, F);
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x - v.front()));
    out.push_back(d);
  }
  return out;
}

/// Distance on the flat torus between two positions.
inline double torus_distance(double x0, double y0, double x1, double y1) {
  auto wrap = [](double d) {
    d = std::fmod(d, kTwoPi);
    if (d > std::numbers::pi) d -= kTwoPi;
    if (d < -std::numbers::pi) d += kTwoPi;
    return d;
  };
  return std::hypot(wrap(x1 - x0), wrap(y1 - y0));
}

// -- characteristics -----------------------------------------------------------

/// beta(g) g_y - alpha(g) g_x = 0 with initial data g0 on the transversal
/// line origin + t * tangent, t in [0, length).
struct CharField {
  std::function<double(double)> alpha;
  std::function<double(double)> beta;
  std::function<double(double)> g0;
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> tangent{1.0, 0.0};
  double length = kTwoPi;
};

/// Hopf normal form g_y + g g_x = 0 (beta = 1, alpha = -g).
inline CharField hopf_char_field(std::function<double(double)> g0) {
  return {[](double g) { return -g; }, [](double) { return 1.0; }, std::move(g0)};
}

/// Velocity functions of the cubic-integral transport equation for given
/// K1, K2, K3 and branch sign (+1 or -1):
///   Q     = sqrt(3 K2^2 + 4 g (g^3 + 3 g K1 - 3 K3))
///   alpha = 3 K2 (branch sqrt(3) K2 - Q) - branch 2 sqrt(3) g (2 g^3 + 3 K3)
///   beta  = 6 g^2 Q
inline CharField cubic_char_field(double K1, double K2, double K3, int branch,
                                  std::function<double(double)> g0) {
  if (branch != 1 && branch != -1) throw PreconditionError("branch must be +1 or -1");
  const double s3 = std::sqrt(3.0);
  auto Q = [=](double g) {
    const double q2 = 3 * K2 * K2 + 4 * g * (g * g * g + 3 * g * K1 - 3 * K3);
    if (q2 < 0.0) throw PreconditionError("characteristic speed undefined (negative radicand)");
    return std::sqrt(q2);
  };
  CharField cf;
  cf.alpha = [=](double g) {
    return 3 * K2 * (branch * s3 * K2 - Q(g)) - branch * 2 * s3 * g * (2 * g * g * g + 3 * K3);
  };
  cf.beta = [=](double g) { return 6 * g * g * Q(g); };
  cf.g0 = std::move(g0);
  return cf;
}

struct BlowupResult {
  enum class Kind { constant_only, blowup, no_crossing };
  Kind kind = Kind::constant_only;
  double time = std::numeric_limits<double>::infinity();  // normal distance from the transversal
  int pair_first = -1;
  int pair_second = -1;
  double g_first = 0.0;
  double g_second = 0.0;
};

namespace detail {
/// Normal distance from the transversal at which the characteristics from
/// parameters t1, t2 meet; nullopt when parallel.
inline std::optional<double> crossing_distance(const CharField& cf, double t1, double t2) {
  const double tx = cf.tangent[0], ty = cf.tangent[1];
  const double tn = std::hypot(tx, ty);
  const double ux = tx / tn, uy = ty / tn;
  const double nx = -uy, ny = ux;
  const double g1 = cf.g0(t1), g2 = cf.g0(t2);
  const double v1x = -cf.alpha(g1), v1y = cf.beta(g1);
  const double v2x = -cf.alpha(g2), v2y = cf.beta(g2);
  // Points P_i = origin + t_i u; solve P1 + s v1 = P2 + r v2.
  const double px = (t2 - t1) * ux, py = (t2 - t1) * uy;
  const double det = v1x * (-v2y) - v1y * (-v2x);
  const double scale = std::hypot(v1x, v1y) * std::hypot(v2x, v2y);
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double s = (px * (-v2y) - py * (-v2x)) / det;
  const double d = s * (v1x * nx + v1y * ny);
  if (!(d > 0.0)) return std::nullopt;  // met in the past
  return d;
}
}  // namespace detail

/// First crossing of straight-line characteristics.  Adjacent pairs of
/// `samples` points are scanned, and the best pair is refined by repeated
/// subdivision of its neighbourhood.
inline BlowupResult characteristics_blowup(const CharField& cf, int samples = 2048,
                                           double constant_eps = 1e-14) {
  if (samples < 3) throw PreconditionError("need at least 3 characteristic samples");
  std::vector<double> ts(samples), gs(samples);
  double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
  for (int i = 0; i < samples; ++i) {
    ts[i] = cf.length * i / samples;
    gs[i] = cf.g0(ts[i]);
    if (!std::isfinite(gs[i])) throw PreconditionError("initial data not finite");
    gmin = std::min(gmin, gs[i]);
    gmax = std::max(gmax, gs[i]);
    const double a = cf.alpha(gs[i]), b = cf.beta(gs[i]);
    if (!std::isfinite(a) || !std::isfinite(b))
      throw PreconditionError("characteristic velocity not finite on the data range");
  }
  BlowupResult res;
  if (gmax - gmin <= constant_eps * (1.0 + std::abs(gmax))) return res;

  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const int j = (i + 1) % samples;
    const double t2 = j == 0 ? cf.length : ts[j];
    if (auto d = detail::crossing_distance(cf, ts[i], t2); d && *d < best_d) {
      best_d = *d;
      best = i;
    }
  }
  if (best < 0) {
    res.kind = BlowupResult::Kind::no_crossing;
    return res;
  }
  // Refine around the best adjacent pair.
  double lo = ts[best] - cf.length / samples, hi = ts[best] + 2 * cf.length / samples;
  double t_best = ts[best], h_best = cf.length / samples;
  for (int round = 0; round < 40; ++round) {
    const int sub = 16;
    const double h = (hi - lo) / sub;
    for (int q = 0; q < sub; ++q) {
      const double a = lo + q * h;
      if (auto d = detail::crossing_distance(cf, a, a + h); d && *d < best_d) {
        best_d = *d;
        t_best = a;
        h_best = h;
      }
    }
    lo = t_best - h_best;
    hi = t_best + 2 * h_best;
    if (h_best < 1e-9 * cf.length) break;
  }
  res.kind = BlowupResult::Kind::blowup;
  res.time = best_d;
  res.pair_first = best;
  res.pair_second = (best + 1) % samples;
  res.g_first = gs[res.pair_first];
  res.g_second = gs[res.pair_second];
  return res;
}

inline std::string to_string(BlowupResult::Kind k) {
  switch (k) {
    case BlowupResult::Kind::constant_only: return "constant_only";
    case BlowupResult::Kind::blowup: return "blowup";
    case BlowupResult::Kind::no_crossing: return "no_crossing";
  }
  return "unknown";
}

}  // namespace mgflow
