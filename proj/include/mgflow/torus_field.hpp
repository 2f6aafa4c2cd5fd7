#pragma once

// Band-limited real functions on the torus R^2 / (2 pi Z)^2.
//
// A TorusField stores the complex Fourier amplitudes c(k1, k2) of
//   u(x, y) = sum c(k1, k2) exp(i (k1 x + k2 y))
// on a dense rectangle |k1| <= bx, |k2| <= by.  Real symmetry
// c(-k) = conj(c(k)) is maintained by every operation.  Ring operations
// are exact up to rounding; division lives on collocation grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgflow/errors.hpp"

namespace mgflow {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Relative amplitude below which modes are dropped after each operation.
inline constexpr double kPruneRelative = 1e-14;

/// Default bound on |k1|, |k2| of any stored mode.
inline constexpr int kDefaultBandwidthCap = 256;

namespace detail {
inline int& bandwidth_cap_slot() {
  thread_local int cap = kDefaultBandwidthCap;
  return cap;
}
}  // namespace detail

/// Current per-thread bandwidth cap used by multiply and reciprocal.
inline int bandwidth_cap() { return detail::bandwidth_cap_slot(); }

/// Overrides the per-thread bandwidth cap for the lifetime of the object.
class ScopedBandwidthCap {
 public:
  explicit ScopedBandwidthCap(int cap) : saved_(detail::bandwidth_cap_slot()) {
    if (cap < 0) throw PreconditionError("bandwidth cap must be non-negative");
    detail::bandwidth_cap_slot() = cap;
  }
  ~ScopedBandwidthCap() { detail::bandwidth_cap_slot() = saved_; }
  ScopedBandwidthCap(const ScopedBandwidthCap&) = delete;
  ScopedBandwidthCap& operator=(const ScopedBandwidthCap&) = delete;

 private:
  int saved_;
};

enum class Axis { x, y };

/// One Fourier mode of a field literal.
struct Mode {
  int k1 = 0;
  int k2 = 0;
  Complex amplitude{};
};

class TorusField {
 public:
  TorusField() = default;

  /// Constant function.
  static TorusField constant(double value) {
    TorusField f;
    if (value != 0.0) {
      f.bx_ = f.by_ = 0;
      f.c_.assign(1, Complex(value, 0.0));
    }
    return f;
  }

  /// Builds a field from a mode list.  A mode whose conjugate partner is
  /// absent gets the partner filled in; a listed partner must agree with
  /// the conjugate to within 1e-12 relative.
  static TorusField from_modes(std::span<const Mode> modes) {
    int bx = -1, by = -1;
    for (const auto& m : modes) {
      bx = std::max(bx, std::abs(m.k1));
      by = std::max(by, std::abs(m.k2));
    }
    if (bx < 0) return {};
    TorusField f;
    f.bx_ = bx;
    f.by_ = by;
    f.c_.assign(f.size(), Complex{});
    std::vector<char> given(f.size(), 0);
    double scale = 0.0;
    for (const auto& m : modes) scale = std::max(scale, std::abs(m.amplitude));
    const double agree = 1e-12 * std::max(scale, 1e-300);

    for (const auto& m : modes) {
      const std::size_t idx = f.index(m.k1, m.k2);
      if (given[idx]) {
        throw PreconditionError("duplicate mode (" + std::to_string(m.k1) + "," +
                                std::to_string(m.k2) + ") in field literal");
      }
      given[idx] = 1;
      f.c_[idx] = m.amplitude;
    }
    for (int k1 = -bx; k1 <= bx; ++k1) {
      for (int k2 = -by; k2 <= by; ++k2) {
        const std::size_t i = f.index(k1, k2);
        const std::size_t j = f.index(-k1, -k2);
        if (!given[i]) continue;
        if (given[j]) {
          if (std::abs(f.c_[i] - std::conj(f.c_[j])) > agree) {
            throw PreconditionError("mode (" + std::to_string(k1) + "," + std::to_string(k2) +
                                    ") conflicts with its conjugate partner");
          }
        } else {
          f.c_[j] = std::conj(f.c_[i]);
          given[j] = 1;
        }
      }
    }
    f.symmetrize();
    f.prune(kPruneRelative * scale);
    return f;
  }

  static TorusField from_modes(std::initializer_list<Mode> modes) {
    return from_modes(std::span<const Mode>(modes.begin(), modes.size()));
  }

  /// a0 + sum_k (c_k cos(k y) + s_k sin(k y)), k = 1, 2, ...
  static TorusField trig_y(double a0, std::span<const double> cos_coeffs,
                           std::span<const double> sin_coeffs = {}) {
    std::vector<Mode> modes{{0, 0, Complex(a0, 0.0)}};
    const std::size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double c = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
      const double s = k < sin_coeffs.size() ? sin_coeffs[k] : 0.0;
      modes.push_back({0, static_cast<int>(k + 1), Complex(c / 2, -s / 2)});
    }
    return from_modes(modes);
  }

  bool is_zero() const { return c_.empty(); }
  int bandwidth_x() const { return bx_; }
  int bandwidth_y() const { return by_; }
  /// max(|k1|, |k2|) over stored modes; -1 for the zero field.
  int bandwidth() const { return std::max(bx_, by_); }

  Complex coeff(int k1, int k2) const {
    if (std::abs(k1) > bx_ || std::abs(k2) > by_) return {};
    return c_[index(k1, k2)];
  }

  double mean() const { return coeff(0, 0).real(); }

  /// Stored nonzero modes, lexicographic in (k1, k2).
  std::vector<Mode> modes() const {
    std::vector<Mode> out;
    for (int k1 = -bx_; k1 <= bx_; ++k1)
      for (int k2 = -by_; k2 <= by_; ++k2)
        if (const Complex c = c_[index(k1, k2)]; c != Complex{}) out.push_back({k1, k2, c});
    return out;
  }

  double max_amplitude() const {
    double m = 0.0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Sum of |c_k|; an upper bound for the sup-norm.
  double l1_norm() const {
    double s = 0.0;
    for (const auto& c : c_) s += std::abs(c);
    return s;
  }

  /// Sum of |c_k| over k != 0.
  double nonconstant_mass() const { return l1_norm() - std::abs(coeff(0, 0)); }

  /// Pointwise value by direct spectral summation.
  double value(double x, double y) const {
    if (c_.empty()) return 0.0;
    const Complex ex = std::polar(1.0, x);
    const Complex ey = std::polar(1.0, y);
    const int ny = 2 * by_ + 1;
    std::vector<Complex> py(ny);
    py[by_] = 1.0;
    for (int k = 1; k <= by_; ++k) {
      py[by_ + k] = py[by_ + k - 1] * ey;
      py[by_ - k] = std::conj(py[by_ + k]);
    }
    // Only k1 >= 0 is needed: the k1 < 0 half is the conjugate of k1 > 0.
    Complex pxk = 1.0;
    double total = 0.0;
    for (int k1 = 0; k1 <= bx_; ++k1) {
      Complex row{};
      const Complex* c = &c_[index(k1, -by_)];
      for (int j = 0; j < ny; ++j) row += c[j] * py[j];
      total += (k1 == 0 ? 1.0 : 2.0) * (row * pxk).real();
      pxk *= ex;
    }
    return total;
  }

  // -- ring operations ------------------------------------------------------

  TorusField& operator+=(const TorusField& o) { return *this = combine(*this, o, 1.0, 1.0); }
  TorusField& operator-=(const TorusField& o) { return *this = combine(*this, o, 1.0, -1.0); }
  TorusField& operator*=(double s) {
    if (s == 0.0) {
      *this = TorusField{};
    } else {
      for (auto& c : c_) c *= s;
    }
    return *this;
  }

  friend TorusField operator+(const TorusField& a, const TorusField& b) {
    return combine(a, b, 1.0, 1.0);
  }
  friend TorusField operator-(const TorusField& a, const TorusField& b) {
    return combine(a, b, 1.0, -1.0);
  }
  friend TorusField operator-(TorusField a) { return a *= -1.0; }
  friend TorusField operator*(TorusField a, double s) { return a *= s; }
  friend TorusField operator*(double s, TorusField a) { return a *= s; }
  friend TorusField operator/(TorusField a, double s) { return a *= 1.0 / s; }
  friend TorusField operator+(const TorusField& a, double s) { return a + constant(s); }
  friend TorusField operator+(double s, const TorusField& a) { return a + constant(s); }
  friend TorusField operator-(const TorusField& a, double s) { return a - constant(s); }
  friend TorusField operator-(double s, const TorusField& a) { return constant(s) - a; }

  /// Exact spectral convolution.  Throws BandwidthExceeded when the result
  /// bandwidth would pass bandwidth_cap().
  friend TorusField operator*(const TorusField& a, const TorusField& b) {
    if (a.is_zero() || b.is_zero()) return {};
    TorusField r;
    r.bx_ = a.bx_ + b.bx_;
    r.by_ = a.by_ + b.by_;
    if (r.bandwidth() > bandwidth_cap()) {
      throw BandwidthExceeded("product bandwidth " + std::to_string(r.bandwidth()) +
                              " exceeds cap " + std::to_string(bandwidth_cap()));
    }
    r.c_.assign(r.size(), Complex{});
    const int ray = 2 * r.by_ + 1;
    const int aay = 2 * a.by_ + 1;
    const int bby = 2 * b.by_ + 1;
    for (int i1 = 0; i1 < 2 * a.bx_ + 1; ++i1) {
      for (int j1 = 0; j1 < 2 * b.bx_ + 1; ++j1) {
        // Row (i1 + j1) of the result collects a-row i1 times b-row j1.
        Complex* out = &r.c_[static_cast<std::size_t>(i1 + j1) * ray];
        const Complex* ar = &a.c_[static_cast<std::size_t>(i1) * aay];
        const Complex* br = &b.c_[static_cast<std::size_t>(j1) * bby];
        for (int i2 = 0; i2 < aay; ++i2) {
          const Complex av = ar[i2];
          if (av == Complex{}) continue;
          Complex* o = out + i2;
          for (int j2 = 0; j2 < bby; ++j2) o[j2] += av * br[j2];
        }
      }
    }
    r.symmetrize();
    r.prune(kPruneRelative * a.max_amplitude() * b.max_amplitude());
    return r;
  }
  TorusField& operator*=(const TorusField& o) { return *this = *this * o; }

  // -- calculus -------------------------------------------------------------

  /// Mode (k1, k2) maps to i k_axis c.
  TorusField derivative(Axis axis) const {
    TorusField r = *this;
    for (int k1 = -bx_; k1 <= bx_; ++k1)
      for (int k2 = -by_; k2 <= by_; ++k2) {
        const int k = axis == Axis::x ? k1 : k2;
        r.c_[index(k1, k2)] *= Complex(0.0, static_cast<double>(k));
      }
    r.prune(kPruneRelative * max_amplitude());
    return r;
  }
  TorusField dx() const { return derivative(Axis::x); }
  TorusField dy() const { return derivative(Axis::y); }

  TorusField laplacian() const {
    TorusField r = *this;
    for (int k1 = -bx_; k1 <= bx_; ++k1)
      for (int k2 = -by_; k2 <= by_; ++k2)
        r.c_[index(k1, k2)] *= -static_cast<double>(k1 * k1 + k2 * k2);
    r.prune(kPruneRelative * max_amplitude());
    return r;
  }

  /// Solves lap(u) = *this on the nonzero modes; the mean of u is `mean`.
  /// The zero mode of *this is ignored.
  TorusField inverse_laplacian(double mean = 0.0) const {
    TorusField r = *this;
    for (int k1 = -bx_; k1 <= bx_; ++k1)
      for (int k2 = -by_; k2 <= by_; ++k2) {
        const int q = k1 * k1 + k2 * k2;
        r.c_[index(k1, k2)] = q == 0 ? Complex(mean, 0.0) : r.c_[index(k1, k2)] / -double(q);
      }
    if (r.c_.empty() && mean != 0.0) return constant(mean);
    r.prune(kPruneRelative * std::max(max_amplitude(), std::abs(mean)));
    return r;
  }

  /// True when no mode has k1 != 0, i.e. the field depends on y alone.
  bool depends_on_y_only() const { return bx_ <= 0; }
  bool depends_on_x_only() const { return by_ <= 0; }

  /// Coefficient-wise sup |a - b|.
  friend double max_coeff_diff(const TorusField& a, const TorusField& b) {
    const int bx = std::max(a.bx_, b.bx_);
    const int by = std::max(a.by_, b.by_);
    double m = 0.0;
    for (int k1 = -bx; k1 <= bx; ++k1)
      for (int k2 = -by; k2 <= by; ++k2) m = std::max(m, std::abs(a.coeff(k1, k2) - b.coeff(k1, k2)));
    return m;
  }

 private:
  int bx_ = -1;
  int by_ = -1;
  std::vector<Complex> c_;  // row k1 = -bx..bx, column k2 = -by..by

  friend class GridTransform;

  std::size_t size() const {
    return static_cast<std::size_t>(2 * bx_ + 1) * static_cast<std::size_t>(2 * by_ + 1);
  }
  std::size_t index(int k1, int k2) const {
    return static_cast<std::size_t>(k1 + bx_) * static_cast<std::size_t>(2 * by_ + 1) +
           static_cast<std::size_t>(k2 + by_);
  }

  static TorusField combine(const TorusField& a, const TorusField& b, double sa, double sb) {
    if (b.is_zero()) return a * sa;
    if (a.is_zero()) return b * sb;
    TorusField r;
    r.bx_ = std::max(a.bx_, b.bx_);
    r.by_ = std::max(a.by_, b.by_);
    r.c_.assign(r.size(), Complex{});
    for (int k1 = -a.bx_; k1 <= a.bx_; ++k1)
      for (int k2 = -a.by_; k2 <= a.by_; ++k2) r.c_[r.index(k1, k2)] += sa * a.c_[a.index(k1, k2)];
    for (int k1 = -b.bx_; k1 <= b.bx_; ++k1)
      for (int k2 = -b.by_; k2 <= b.by_; ++k2) r.c_[r.index(k1, k2)] += sb * b.c_[b.index(k1, k2)];
    r.prune(kPruneRelative *
            std::max(std::abs(sa) * a.max_amplitude(), std::abs(sb) * b.max_amplitude()));
    return r;
  }

  void symmetrize() {
    for (int k1 = 0; k1 <= bx_; ++k1)
      for (int k2 = -by_; k2 <= by_; ++k2) {
        if (k1 == 0 && k2 < 0) continue;
        Complex& p = c_[index(k1, k2)];
        Complex& q = c_[index(-k1, -k2)];
        const Complex avg = 0.5 * (p + std::conj(q));
        p = avg;
        q = std::conj(avg);
      }
  }

  /// Zeroes modes below `threshold` and shrinks the stored rectangle.
  void prune(double threshold) {
    if (c_.empty()) return;
    int nbx = -1, nby = -1;
    for (int k1 = -bx_; k1 <= bx_; ++k1)
      for (int k2 = -by_; k2 <= by_; ++k2) {
        Complex& c = c_[index(k1, k2)];
        if (std::abs(c) <= threshold) {
          c = Complex{};
        } else {
          nbx = std::max(nbx, std::abs(k1));
          nby = std::max(nby, std::abs(k2));
        }
      }
    if (nbx < 0) {
      *this = TorusField{};
      return;
    }
    if (nbx == bx_ && nby == by_) return;
    TorusField r;
    r.bx_ = nbx;
    r.by_ = nby;
    r.c_.assign(r.size(), Complex{});
    for (int k1 = -nbx; k1 <= nbx; ++k1)
      for (int k2 = -nby; k2 <= nby; ++k2) r.c_[r.index(k1, k2)] = c_[index(k1, k2)];
    *this = std::move(r);
  }
};

inline TorusField derivative(const TorusField& f, Axis axis) { return f.derivative(axis); }
inline TorusField laplacian(const TorusField& f) { return f.laplacian(); }
inline TorusField multiply(const TorusField& a, const TorusField& b) { return a * b; }

inline TorusField pow(const TorusField& f, int n) {
  if (n < 0) throw PreconditionError("negative field power");
  TorusField r = TorusField::constant(1.0);
  for (int i = 0; i < n; ++i) r = r * f;
  return r;
}

// -- collocation grids --------------------------------------------------------

/// Values on the uniform n x n grid x_i = 2 pi i / n, y_j = 2 pi j / n,
/// stored row-major in i.
struct GridField {
  int n = 0;
  std::vector<double> values;

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  static double coord(int i, int n) { return kTwoPi * i / n; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

class GridTransform {
 public:
  /// Evaluates the field on the n x n grid (no aliasing restriction).
  static GridField sample(const TorusField& f, int n) {
    if (n < 1) throw PreconditionError("grid resolution must be positive");
    GridField g{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    if (f.is_zero()) return g;
    const auto roots = unit_roots(n);
    const int ny = 2 * f.by_ + 1;
    // s[k1][j] = sum_k2 c(k1, k2) w^(k2 j), only k1 >= 0 stored.
    std::vector<Complex> s(static_cast<std::size_t>(f.bx_ + 1) * n);
    for (int k1 = 0; k1 <= f.bx_; ++k1) {
      const Complex* c = &f.c_[f.index(k1, -f.by_)];
      for (int j = 0; j < n; ++j) {
        Complex acc{};
        for (int t = 0; t < ny; ++t) acc += c[t] * roots[wrap(long(t - f.by_) * j, n)];
        s[static_cast<std::size_t>(k1) * n + j] = acc;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = s[j].real();
        for (int k1 = 1; k1 <= f.bx_; ++k1)
          v += 2.0 * (s[static_cast<std::size_t>(k1) * n + j] * roots[wrap(long(k1) * i, n)]).real();
        g.at(i, j) = v;
      }
    return g;
  }

  /// Recovers modes |k1|, |k2| <= bandwidth from grid values.
  static TorusField analyze(const GridField& g, int bandwidth) {
    const int n = g.n;
    if (bandwidth < 0) return {};
    if (n < 2 * bandwidth + 1) {
      throw AliasingError("grid resolution " + std::to_string(n) + " cannot resolve bandwidth " +
                          std::to_string(bandwidth) + " (need n >= " +
                          std::to_string(2 * bandwidth + 1) + ")");
    }
    const auto roots = unit_roots(n);
    const int nb = 2 * bandwidth + 1;
    // t[i][k2] = sum_j v(i, j) w^(-k2 j)
    std::vector<Complex> t(static_cast<std::size_t>(n) * nb);
    for (int i = 0; i < n; ++i)
      for (int k2 = -bandwidth; k2 <= bandwidth; ++k2) {
        Complex acc{};
        for (int j = 0; j < n; ++j) acc += g.at(i, j) * std::conj(roots[wrap(long(k2) * j, n)]);
        t[static_cast<std::size_t>(i) * nb + (k2 + bandwidth)] = acc;
      }
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(nb) * nb);
    double scale = 0.0;
    const double norm = 1.0 / (double(n) * double(n));
    for (int k1 = -bandwidth; k1 <= bandwidth; ++k1)
      for (int k2 = -bandwidth; k2 <= bandwidth; ++k2) {
        Complex acc{};
        for (int i = 0; i < n; ++i)
          acc += t[static_cast<std::size_t>(i) * nb + (k2 + bandwidth)] *
                 std::conj(roots[wrap(long(k1) * i, n)]);
        modes.push_back({k1, k2, acc * norm});
        scale = std::max(scale, std::abs(acc * norm));
      }
    TorusField f;
    f.bx_ = f.by_ = bandwidth;
    f.c_.resize(f.size());
    for (const auto& m : modes) f.c_[f.index(m.k1, m.k2)] = m.amplitude;
    f.symmetrize();
    f.prune(kPruneRelative * scale);
    return f;
  }

 private:
  static std::size_t wrap(long v, int n) { return static_cast<std::size_t>(((v % n) + n) % n); }
  static std::vector<Complex> unit_roots(int n) {
    std::vector<Complex> r(n);
    for (int k = 0; k < n; ++k) r[k] = std::polar(1.0, kTwoPi * k / n);
    return r;
  }
};

/// Grid values; requires n >= 2 * bandwidth + 1 so that from_grid inverts it.
inline GridField to_grid(const TorusField& f, int n) {
  if (n < 2 * f.bandwidth() + 1) {
    throw AliasingError("grid resolution " + std::to_string(n) + " aliases bandwidth " +
                        std::to_string(f.bandwidth()));
  }
  return GridTransform::sample(f, n);
}

inline TorusField from_grid(const GridField& g, int bandwidth) {
  return GridTransform::analyze(g, bandwidth);
}

/// Sampling without the round-trip precondition.
inline GridField evaluate_on_grid(const TorusField& f, int n) { return GridTransform::sample(f, n); }

/// Grid resolution used for residual sup-norms of a field of bandwidth b.
inline int dealiased_resolution(int b) { return std::max(4 * b + 1, 33); }

/// Max |u| over a dealiased grid.
inline double sup_norm(const TorusField& f) {
  if (f.is_zero()) return 0.0;
  return GridTransform::sample(f, dealiased_resolution(f.bandwidth())).max_abs();
}

// -- constancy ----------------------------------------------------------------

struct ConstancyResult {
  bool constant = false;
  double value = 0.0;             // coeff(0, 0)
  double max_nonconstant = 0.0;   // largest |c_k|, k != 0
  double nonconstant_mass = 0.0;  // sum of |c_k|, k != 0
};

inline constexpr double kDefaultConstancyEps = 1e-10;

inline ConstancyResult constancy_test(const TorusField& f, double eps = kDefaultConstancyEps) {
  ConstancyResult r;
  r.value = f.mean();
  for (const auto& m : f.modes()) {
    if (m.k1 == 0 && m.k2 == 0) continue;
    r.max_nonconstant = std::max(r.max_nonconstant, std::abs(m.amplitude));
    r.nonconstant_mass += std::abs(m.amplitude);
  }
  r.constant = r.max_nonconstant <= eps * (1.0 + std::abs(r.value));
  return r;
}

// -- reciprocal ---------------------------------------------------------------

inline constexpr double kDefaultReciprocalTol = 1e-12;

/// Truncated spectral 1/u with sup |u r - 1| <= tol on a dealiased grid.
/// Throws DegenerateField when u vanishes or changes sign, BandwidthExceeded
/// when tol is out of reach under the cap.
inline TorusField reciprocal(const TorusField& f, double tol = kDefaultReciprocalTol) {
  if (!(tol > 0.0)) throw PreconditionError("reciprocal tolerance must be positive");
  if (f.is_zero()) throw DegenerateField("reciprocal of the zero field");
  if (f.bandwidth() == 0) return TorusField::constant(1.0 / f.mean());

  int b = std::max(2 * f.bandwidth(), 8);
  for (;;) {
    const int n = 2 * b + 1;
    GridField g = GridTransform::sample(f, n);
    double lo = g.values[0], hi = g.values[0];
    for (double v : g.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo <= 0.0 && hi >= 0.0) {
      throw DegenerateField("field vanishes on the collocation grid (range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "])");
    }
    for (double& v : g.values) v = 1.0 / v;
    TorusField r = GridTransform::analyze(g, b);
    const TorusField residual = f * r - 1.0;
    if (sup_norm(residual) <= tol) return r;
    if (2 * b > bandwidth_cap()) {
      throw BandwidthExceeded("reciprocal did not reach tolerance " + std::to_string(tol) +
                              " within bandwidth cap " + std::to_string(bandwidth_cap()));
    }
    b = std::min(2 * b, bandwidth_cap());
  }
}

}  // namespace mgflow
