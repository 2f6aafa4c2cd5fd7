#pragma once

// Named check batteries with tagged residual rows.  A battery passes when
// every row is within its tolerance.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgflow/appendix.hpp"
#include "mgflow/cascade.hpp"
#include "mgflow/dynamics.hpp"
#include "mgflow/energy_level.hpp"
#include "mgflow/families.hpp"
#include "mgflow/io.hpp"

namespace mgflow {

struct ResidualRow {
  double value = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;  // pass when value >= tolerance

  bool pass() const { return lower_bound ? value >= tolerance : value <= tolerance; }
};

struct CheckReport {
  std::string name;
  std::map<std::string, ResidualRow> rows;
  json info = json::object();

  void add(const std::string& tag, double value, double tol) { rows[tag] = {value, tol, false}; }
  void add_at_least(const std::string& tag, double value, double bound) { rows[tag] = {value, bound, true}; }
  void add_all(const std::map<std::string, double>& values, double tol) {
    for (const auto& [tag, v] : values) add(tag, v, tol);
  }

  bool passed() const {
    for (const auto& [tag, r] : rows)
      if (!r.pass()) return false;
    return true;
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (const auto& [tag, r] : rows)
      if (!r.pass()) out.push_back(tag);
    return out;
  }

  json to_json() const {
    json rj = json::object();
    for (const auto& [tag, r] : rows) {
      rj[tag] = {{"value", r.value}, {"tolerance", r.tolerance}, {"pass", r.pass()}};
      if (r.lower_bound) rj[tag]["bound"] = "min";
    }
    return {{"check", name},
            {"status", passed() ? "PASS" : "FAIL"},
            {"residuals", rj},
            {"violations", violations()},
            {"info", info}};
  }
};

struct CheckOptions {
  double tol = 1e-10;
  int grid = 12;
  std::vector<double> levels;        // energy levels to test, empty = skip
  std::vector<double> probe_levels;  // extra levels that must follow
  bool full_level_count = false;     // require N + 2 levels instead of floor((N + 2) / 2)
  std::vector<std::pair<std::string, double>> perturb;
  std::optional<FamilySpec> spec;
  int appendix_n = 8;
};

/// Lambda = 2 + cos y, f1 = sin y with fixed constants.
inline FamilySpec default_family(int degree) {
  FamilySpec s;
  s.degree = degree;
  s.lambda = TorusField::from_modes({{0, 0, 2.0}, {0, 1, 0.5}});
  s.f1 = TorusField::from_modes({{0, 1, Complex(0.0, -0.5)}});
  if (degree == 3) {
    s.constants.K1 = 1.0;
    s.constants.s0 = 1.0;
    s.constants.s2 = 0.5;
  } else {
    s.constants.K1 = 0.7;
    s.constants.K3 = -0.3;
    s.constants.s2 = 0.4;
    s.constants.s3 = 0.25;
    s.constants.s5 = 0.3;
    s.constants.s6 = -0.2;
  }
  return s;
}

inline CheckReport check_example1(const CheckOptions& opt) {
  CheckReport rep;
  rep.name = "example1";
  const TorusField lambda = TorusField::from_modes({{0, 0, 2.0}, {0, 1, 0.5}});
  const TorusField u = TorusField::from_modes({{0, 1, Complex(0.0, -0.5)}});
  const TorusField omega = -u.dy();
  MomentumPolynomial F1 = MomentumPolynomial::p1();
  F1.add_to(0, 0, u);
  rep.add("example1_bracket", magnetic_bracket(F1, hamiltonian(lambda), omega).sup_norm(), opt.tol);
  const CascadeReport c = analyze_cascade(F1, lambda, omega);
  rep.add("bracket_max", c.max_bracket_residual(), opt.tol);
  return rep;
}

namespace detail {
inline void add_levels(CheckReport& rep, const MomentumPolynomial& F, const TorusField& lambda,
                       const TorusField& omega, const CheckOptions& opt) {
  if (opt.levels.empty()) return;
  SplitOptions so;
  so.n_grid = opt.grid;
  so.sharp_level_count = !opt.full_level_count;
  so.probe_levels = opt.probe_levels;
  const SplitResult r = split_by_energy(F, lambda, omega, opt.levels, so);
  for (double c : opt.levels) {
    const LevelModes m = level_condition_modes(F, lambda, omega, c, opt.grid);
    rep.add("level_C" + format_double(c), m.max_amplitude(), level_tolerance(F, c, opt.tol));
  }
  for (const auto& [c, a] : r.probes) rep.add("probe_C" + format_double(c), a, level_tolerance(F, c, opt.tol));
  rep.info["required_levels"] = r.required_levels;
}
}  // namespace detail

/// Degree-3 or degree-4 family battery: bracket, reduction identity, the
/// coefficient equations, cascade, constants and optional energy levels.
inline CheckReport check_family(int degree, const CheckOptions& opt) {
  if (degree != 3 && degree != 4) throw PreconditionError("family checks exist for degree 3 and 4");
  const FamilySpec spec = opt.spec ? *opt.spec : default_family(degree);
  if (spec.degree != degree) {
    throw PreconditionError("spec has degree " + std::to_string(spec.degree) + ", check needs " +
                            std::to_string(degree));
  }
  CheckReport rep;
  rep.name = "degree" + std::to_string(degree);
  MomentumPolynomial F = build_family(spec);
  for (const auto& [key, delta] : opt.perturb) perturb_coefficient(F, degree, key, delta);
  const TorusField omega = spec.omega();
  const TorusField& lambda = spec.lambda;

  rep.add("bracket_sup", magnetic_bracket(F, hamiltonian(lambda), omega).sup_norm(), opt.tol);
  rep.add("reduction_identity", identity_reduction_check(F, spec), opt.tol);
  rep.add_all(degree == 3 ? degree3_equation_residuals(F, lambda, omega)
                          : degree4_equation_residuals(F, lambda, omega),
              opt.tol);
  CascadeReport c = analyze_cascade(F, lambda, omega);
  rep.add_all(c.residual_norms, opt.tol);

  const KolokoltsovResult k = kolokoltsov_check(F);
  rep.add("kolokoltsov_A0", std::abs(k.a0 - 1.0), opt.tol);
  rep.add("kolokoltsov_A1", std::abs(k.a1), opt.tol);
  rep.add("kolokoltsov_nonconstant", k.nonconstant_mass, opt.tol);
  for (const auto& cc : conserved_combinations(F)) {
    rep.add(cc.equation, cc.max_nonconstant, opt.tol);
    rep.info["constants"][cc.name] = cc.field.mean();
  }
  detail::add_levels(rep, F, lambda, omega, opt);
  rep.info["family"] = family_to_json(spec);
  return rep;
}

inline CheckReport check_appendix(const CheckOptions& opt) {
  CheckReport rep;
  rep.name = "appendix";
  const int N = opt.appendix_n;
  if (N < 2) throw PreconditionError("appendix check needs N >= 2");
  // potential phi = sin(x + y) / 2 + cos(2x - y) / 3 gives f = phi_y, g = phi_x
  const TorusField phi = TorusField::from_modes(
      {{1, 1, Complex(0.0, -0.25)}, {2, -1, Complex(1.0 / 6.0, 0.0)}});
  const TorusField f = phi.dy(), g = phi.dx();
  double ab = 0.0, recur = 0.0;
  for (int n = 0; n <= N; ++n) {
    const ABPair s = poly_AB(n, f, g), cx = poly_AB_complex(n, f, g);
    ab = std::max({ab, sup_norm(s.A - cx.A), sup_norm(s.B - cx.B)});
    const RecurrenceResiduals r = lemma4_check(n, f, g);
    recur = std::max({recur, r.a_relation, r.b_relation, r.ay_identity, r.bx_identity});
  }
  rep.add("eq_6_3_6_4_sum_vs_complex", ab, std::min(opt.tol, 1e-12));
  rep.add("eq_6_5_6_6", recur, opt.tol);
  CascadeCoefficients k;
  k.N = N;
  for (int j = 2; j <= N; ++j) {
    k.a[j] = 1.0 / (j + 1);
    k.b[j] = -0.5 / j;
  }
  const ClosedFormCascade cf = cascade_closed_form(k, f, g);
  rep.add_all(second_order_cascade_residuals(cf, f, g), opt.tol);
  for (int j = 2; j <= std::min(N, 3); ++j) {
    const ABPair p = explicit_alpha_beta(j, N, k.a_at(2), k.b_at(2), k.a_at(3), k.b_at(3), f, g);
    rep.add("explicit_j" + std::to_string(j),
            std::max(max_coeff_diff(p.A, cf.alpha[j]), max_coeff_diff(p.B, cf.beta[j])), opt.tol);
  }
  double lead = 0.0;
  for (int j = 2; j <= N; ++j) {
    lead = std::max(lead, std::abs(cf.symbols[j].mu[j - 1] - cascade_c(N, j - 1)));
    lead = std::max(lead, std::abs(cf.symbols[j].mu[j - 2]));
  }
  rep.add("eq_6_7_6_8_leading", lead, opt.tol);
  json table = json::object();
  for (int j = 3; j <= N; ++j)
    for (int i = 0; i <= j - 3; ++i)
      table["j" + std::to_string(j)]["i" + std::to_string(i)] = {cf.m(i, j), cf.n(i, j)};
  rep.info["m_n_table"] = table;
  return rep;
}

inline CheckReport check_dynamics(const CheckOptions& opt) {
  CheckReport rep;
  rep.name = "dynamics";
  const FamilySpec spec = opt.spec && opt.spec->degree == 3 ? *opt.spec : default_family(3);
  const MomentumPolynomial F3 = build_family(spec);
  const MomentumPolynomial F1 = linear_family(spec.f1, 3).F1;
  const FlowField field(spec.lambda, spec.omega(), 1.0);
  const FlowState start{0.3, 0.7, 0.4};
  StepControl ad;
  ad.abs_tol = ad.rel_tol = 1e-12;
  const auto drift = drift_report(field, integrate_flow(field, start, 100.0, ad), {F1, F3});
  rep.add("drift_F1", drift[0], 1e-8);
  rep.add("drift_F3", drift[1], 1e-7);

  StepControl fx;
  fx.mode = StepControl::Mode::fixed;
  fx.step = 0.04;
  const double coarse = drift_report(field, integrate_flow(field, start, 100.0, fx), {F3})[0];
  fx.step = 0.02;
  const double fine = drift_report(field, integrate_flow(field, start, 100.0, fx), {F3})[0];
  rep.add_at_least("step_halving_ratio", coarse / std::max(fine, 1e-300), 4.0);

  const double w = 0.7, period = kTwoPi / w;
  const FlowField flat(TorusField::constant(1.0), TorusField::constant(w), 1.0);
  StepControl pc = ad;
  pc.sample_interval = period;
  const FlowState s0{1.0, 2.0, 0.3};
  const FlowState e = integrate_flow(flat, s0, period, pc).unwrapped.back();
  rep.add("constant_field_period",
          std::max({std::abs(e[0] - s0[0]), std::abs(e[1] - s0[1]), std::abs(e[2] - s0[2] + kTwoPi)}),
          1e-8);
  return rep;
}

inline CheckReport check_blowup(const CheckOptions&) {
  CheckReport rep;
  rep.name = "blowup";
  const BlowupResult r = characteristics_blowup(hopf_char_field([](double x) { return std::sin(x); }));
  rep.add("hopf_T_star", r.kind == BlowupResult::Kind::blowup ? std::abs(r.time - 1.0) : 1.0, 0.01);
  const BlowupResult c = characteristics_blowup(hopf_char_field([](double) { return 0.4; }));
  rep.add("constant_only", c.kind == BlowupResult::Kind::constant_only ? 0.0 : 1.0, 0.0);
  rep.info["hopf"] = blowup_to_json(r);
  return rep;
}

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"example1", "degree3", "degree4",
                                              "appendix", "dynamics", "blowup"};
  return names;
}

inline CheckReport run_check(const std::string& name, const CheckOptions& opt) {
  if (name == "example1") return check_example1(opt);
  if (name == "degree3") return check_family(3, opt);
  if (name == "degree4") return check_family(4, opt);
  if (name == "appendix") return check_appendix(opt);
  if (name == "dynamics") return check_dynamics(opt);
  if (name == "blowup") return check_blowup(opt);
  throw PreconditionError("unknown check '" + name + "'");
}

struct SuiteResult {
  bool passed = true;
  json report;
};

/// All batteries; family checks use levels {1, 2} (degree 3) and {1, 2, 3}
/// (degree 4) with probe levels unless levels are given.
inline SuiteResult run_check_suite(const CheckOptions& base) {
  SuiteResult out;
  json checks = json::object();
  for (const auto& name : check_names()) {
    CheckOptions opt = base;
    opt.spec.reset();
    if (name == "degree3" || name == "degree4") {
      if (opt.levels.empty()) {
        opt.levels = name == "degree3" ? std::vector<double>{1.0, 2.0} : std::vector<double>{1.0, 2.0, 3.0};
        opt.probe_levels = name == "degree3" ? std::vector<double>{5.0, 9.3} : std::vector<double>{7.0};
      }
    }
    const CheckReport r = run_check(name, opt);
    out.passed = out.passed && r.passed();
    checks[name] = r.to_json();
  }
  out.report = {{"status", out.passed ? "PASS" : "FAIL"}, {"checks", checks}};
  return out;
}

}  // namespace mgflow
