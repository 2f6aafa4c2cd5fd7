// mgflow: command-line front-end.
//
// Exit status: 0 when every residual is within tolerance, 1 when some
// residual exceeds it, 2 on invalid input.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mgflow/mgflow.hpp"

using namespace mgflow;

namespace {

struct Globals {
  double tol = 1e-10;
  int grid = 12;
  int bandwidth_cap = kDefaultBandwidthCap;
  std::string out;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw PreconditionError("not a number: '" + item + "'");
    }
  }
  return v;
}

std::pair<std::string, double> parse_perturb(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw PreconditionError("--perturb expects key=value, got '" + kv + "'");
  const auto v = parse_list(kv.substr(eq + 1));
  if (v.size() != 1) throw PreconditionError("--perturb expects one value in '" + kv + "'");
  return {kv.substr(0, eq), v[0]};
}

/// Prints the report and writes it to --out, or to $MGFLOW_OUT_DIR/<name>.json.
void emit(const Globals& g, const std::string& name, const json& report) {
  const std::string text = dump_report(report);
  std::cout << text;
  std::string path = g.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("MGFLOW_OUT_DIR"); dir && *dir)
      path = (std::filesystem::path(dir) / (name + ".json")).string();
  }
  if (!path.empty()) write_text_file(path, text);
}

int status_of(const CheckReport& r) {
  if (r.passed()) return 0;
  for (const auto& tag : r.violations()) {
    const auto& row = r.rows.at(tag);
    std::cerr << "FAIL " << r.name << ": " << tag << " = " << row.value
              << (row.lower_bound ? " below " : " exceeds ") << row.tolerance << "\n";
  }
  return 1;
}

struct PolyConfig {
  TorusField lambda;
  TorusField omega;
  MomentumPolynomial F;
  std::optional<MomentumPolynomial> G;
};

PolyConfig load_poly_config(const std::string& path) {
  const json j = read_json_file(path);
  PolyConfig c;
  c.lambda = field_from_json(j.at("lambda"));
  c.omega = j.contains("omega") ? field_from_json(j.at("omega")) : TorusField{};
  c.F = poly_from_json(j.at("F"));
  if (j.contains("G")) c.G = poly_from_json(j.at("G"));
  return c;
}

FamilySpec load_spec_or_default(const std::string& path, int degree) {
  if (path.empty()) return default_family(degree);
  return family_from_json(read_json_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial first integrals of magnetic geodesic flows on the 2-torus"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--tol", g.tol, "Residual tolerance")->capture_default_str();
  app.add_option("--grid", g.grid, "Grid points per axis for energy-level sampling")->capture_default_str();
  app.add_option("--bandwidth-cap", g.bandwidth_cap, "Maximum Fourier bandwidth")->capture_default_str();
  app.add_option("--out", g.out, "Report path (default: $MGFLOW_OUT_DIR/<command>.json)");
  app.fallthrough();

  int rc = 0;
  auto run = [&](auto&& fn) {
    return [&, fn]() mutable {
      if (g.bandwidth_cap < 1) throw PreconditionError("--bandwidth-cap must be positive");
      const ScopedBandwidthCap cap(g.bandwidth_cap);
      rc = fn();
    };
  };

  // field
  auto* field_cmd = app.add_subcommand("field", "Normalize a field literal and report its norms");
  std::string field_in;
  bool field_recip = false;
  field_cmd->add_option("--in", field_in, "Field literal JSON")->required();
  field_cmd->add_flag("--reciprocal", field_recip, "Also compute 1/f");
  field_cmd->callback(run([&] {
    const TorusField f = field_from_json(read_json_file(field_in));
    json rep = {{"field", field_to_json(f)},
                {"bandwidth", f.bandwidth()},
                {"mean", f.mean()},
                {"sup_norm", sup_norm(f)},
                {"l1_norm", f.l1_norm()}};
    int status = 0;
    if (field_recip) {
      const TorusField r = reciprocal(f, g.tol);
      const double res = sup_norm(f * r - 1.0);
      rep["reciprocal"] = field_to_json(r);
      rep["reciprocal_residual"] = res;
      if (res > 100 * g.tol) status = 1;
    }
    emit(g, "field", rep);
    return status;
  }));

  // bracket
  auto* bracket_cmd = app.add_subcommand("bracket", "Magnetic bracket {F, G} (G defaults to H)");
  std::string bracket_cfg;
  bracket_cmd->add_option("--config", bracket_cfg, "JSON with lambda, omega, F and optional G")->required();
  bracket_cmd->callback(run([&] {
    const PolyConfig c = load_poly_config(bracket_cfg);
    const MomentumPolynomial G = c.G ? *c.G : hamiltonian(c.lambda);
    const MomentumPolynomial b = magnetic_bracket(c.F, G, c.omega);
    CheckReport r;
    r.name = "bracket";
    r.add("bracket_sup", b.sup_norm(), g.tol);
    r.info["bracket"] = poly_to_json(b);
    emit(g, "bracket", r.to_json());
    return status_of(r);
  }));

  // cascade
  auto* cascade_cmd = app.add_subcommand("cascade", "Bracket coefficients and cascade residuals");
  std::string cascade_cfg;
  bool emit_sys = false;
  int emit_degree = 3;
  cascade_cmd->add_option("--config", cascade_cfg, "JSON with lambda, omega and F");
  cascade_cmd->add_flag("--emit-system", emit_sys, "Print the symbolic coefficient system");
  cascade_cmd->add_option("--degree", emit_degree, "Degree for --emit-system")->capture_default_str();
  cascade_cmd->callback(run([&] {
    if (emit_sys) {
      std::cout << emit_system(emit_degree);
      return 0;
    }
    if (cascade_cfg.empty()) throw PreconditionError("cascade needs --config or --emit-system");
    const PolyConfig c = load_poly_config(cascade_cfg);
    const CascadeReport cr = analyze_cascade(c.F, c.lambda, c.omega);
    CheckReport r;
    r.name = "cascade";
    r.add_all(cr.residual_norms, g.tol);
    const KolokoltsovResult k = kolokoltsov_check(c.F);
    r.info["kolokoltsov"] = {{"A0", k.a0}, {"A1", k.a1}, {"harmonic", k.harmonic}, {"constant", k.constant}};
    json m = json::object();
    for (const auto& [key, f] : cr.M)
      m["M_" + std::to_string(key.first) + "_" + std::to_string(key.second)] = sup_norm(f);
    r.info["bracket_coefficients_sup"] = m;
    emit(g, "cascade", r.to_json());
    return status_of(r);
  }));

  // levels
  auto* levels_cmd = app.add_subcommand("levels", "Level-condition modes across energy levels");
  std::string levels_cfg, levels_list, probe_list, levels_csv;
  bool full_count = false;
  levels_cmd->add_option("--config", levels_cfg, "JSON with lambda, omega and F")->required();
  levels_cmd->add_option("--levels", levels_list, "Comma-separated energy levels C")->required();
  levels_cmd->add_option("--probe", probe_list, "Comma-separated probe levels");
  levels_cmd->add_option("--csv", levels_csv, "Write mode amplitude vs sqrt(C) CSV");
  levels_cmd->add_flag("--full-level-count", full_count, "Require N + 2 levels");
  levels_cmd->callback(run([&] {
    const PolyConfig c = load_poly_config(levels_cfg);
    const auto levels = parse_list(levels_list);
    std::vector<LevelModes> samples;
    for (double lv : levels) samples.push_back(level_condition_modes(c.F, c.lambda, c.omega, lv, g.grid));
    const int N = std::max(c.F.degree(), 0);
    const int fit_degree = std::min(static_cast<int>(samples.size()) - 1, N + 1);
    const SqrtCFit fit = sqrtC_polynomialize(samples, fit_degree);
    json rows = json::array();
    for (const auto& s : samples)
      for (int k = -s.max_mode; k <= s.max_mode; ++k)
        rows.push_back({{"level", s.level},
                        {"mode", k},
                        {"max_amplitude", s.max_amplitude(k)},
                        {"fit_degree", fit_degree},
                        {"fit_residual", fit.mode_residual[k + s.max_mode]}});
    CheckOptions opt;
    opt.tol = g.tol;
    opt.grid = g.grid;
    opt.levels = levels;
    opt.probe_levels = parse_list(probe_list);
    opt.full_level_count = full_count;
    CheckReport r;
    r.name = "levels";
    detail::add_levels(r, c.F, c.lambda, c.omega, opt);
    r.info["rows"] = rows;
    if (!levels_csv.empty()) write_text_file(levels_csv, level_modes_csv(samples));
    emit(g, "levels", r.to_json());
    return status_of(r);
  }));

  // family build / check
  auto* family_cmd = app.add_subcommand("family", "Closed-form integrable families");
  family_cmd->require_subcommand(1);
  std::string family_spec;
  std::vector<std::string> family_perturb;
  std::string family_levels, family_probe;
  auto* fbuild = family_cmd->add_subcommand("build", "Emit the integral as a polynomial");
  fbuild->add_option("--spec", family_spec, "Family spec JSON")->required();
  fbuild->callback(run([&] {
    const FamilySpec spec = family_from_json(read_json_file(family_spec));
    const LinearFamily lf = linear_family(spec.f1, spec.degree);
    emit(g, "family_build",
         {{"family", family_to_json(spec)},
          {"integral", poly_to_json(build_family(spec))},
          {"linear_integral", poly_to_json(lf.F1)},
          {"omega", field_to_json(lf.omega)}});
    return 0;
  }));
  auto* fcheck = family_cmd->add_subcommand("check", "Run the family residual battery");
  fcheck->add_option("--spec", family_spec, "Family spec JSON")->required();
  fcheck->add_option("--levels", family_levels, "Comma-separated energy levels");
  fcheck->add_option("--probe", family_probe, "Comma-separated probe levels");
  fcheck->add_option("--perturb", family_perturb, "Coefficient shift key=value")->take_all();
  fcheck->callback(run([&] {
    CheckOptions opt;
    opt.tol = g.tol;
    opt.grid = g.grid;
    opt.spec = family_from_json(read_json_file(family_spec));
    opt.levels = parse_list(family_levels);
    opt.probe_levels = parse_list(family_probe);
    for (const auto& kv : family_perturb) opt.perturb.push_back(parse_perturb(kv));
    const CheckReport r = check_family(opt.spec->degree, opt);
    emit(g, "family_check", r.to_json());
    return status_of(r);
  }));

  // appendix verify
  auto* appendix_cmd = app.add_subcommand("appendix", "A_n, B_n polynomials and the closed-form cascade");
  appendix_cmd->require_subcommand(1);
  int appendix_n = 8;
  auto* averify = appendix_cmd->add_subcommand("verify", "Residual report up to degree N");
  averify->add_option("--n", appendix_n, "Degree N")->capture_default_str();
  averify->callback(run([&] {
    CheckOptions opt;
    opt.tol = g.tol;
    opt.appendix_n = appendix_n;
    const CheckReport r = check_appendix(opt);
    emit(g, "appendix", r.to_json());
    return status_of(r);
  }));

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "Integrate the flow on one energy level and report drift");
  std::string flow_spec, flow_start = "0.3,0.7,0.4", flow_csv;
  double flow_level = 1.0, flow_time = 100.0, flow_rtol = 1e-12, flow_atol = 1e-12, flow_step = 0.0,
         flow_sample = 0.1, flow_drift_tol = 1e-7;
  flow_cmd->add_option("--spec", flow_spec, "Family spec JSON (default: built-in degree 3)");
  flow_cmd->add_option("--level", flow_level, "Energy level C")->capture_default_str();
  flow_cmd->add_option("--time", flow_time, "Integration time")->capture_default_str();
  flow_cmd->add_option("--start", flow_start, "x,y,phi")->capture_default_str();
  flow_cmd->add_option("--rtol", flow_rtol, "Relative tolerance")->capture_default_str();
  flow_cmd->add_option("--atol", flow_atol, "Absolute tolerance")->capture_default_str();
  flow_cmd->add_option("--fixed-step", flow_step, "Use RK4 with this step instead of adaptive control");
  flow_cmd->add_option("--sample", flow_sample, "Output interval")->capture_default_str();
  flow_cmd->add_option("--drift-tol", flow_drift_tol, "Allowed drift of each integral")->capture_default_str();
  flow_cmd->add_option("--csv", flow_csv, "Write trajectory CSV");
  flow_cmd->callback(run([&] {
    const FamilySpec spec = load_spec_or_default(flow_spec, 3);
    const auto s = parse_list(flow_start);
    if (s.size() != 3) throw PreconditionError("--start expects x,y,phi");
    const FlowField field(spec.lambda, spec.omega(), flow_level);
    StepControl ctl;
    ctl.rel_tol = flow_rtol;
    ctl.abs_tol = flow_atol;
    ctl.sample_interval = flow_sample;
    if (flow_step > 0.0) {
      ctl.mode = StepControl::Mode::fixed;
      ctl.step = flow_step;
    }
    const Trajectory traj = integrate_flow(field, {s[0], s[1], s[2]}, flow_time, ctl);
    const std::vector<std::pair<std::string, MomentumPolynomial>> integrals{
        {"F1", linear_family(spec.f1, spec.degree).F1},
        {"F" + std::to_string(spec.degree), build_family(spec)}};
    CheckReport r;
    r.name = "flow";
    std::vector<MomentumPolynomial> polys;
    for (const auto& [name, p] : integrals) polys.push_back(p);
    const auto drift = drift_report(field, traj, polys);
    for (std::size_t i = 0; i < integrals.size(); ++i)
      r.add("drift_" + integrals[i].first, drift[i], flow_drift_tol);
    const FlowState& e = traj.states.back();
    r.info["final_state"] = {e[0], e[1], e[2]};
    r.info["samples"] = traj.times.size();
    if (!flow_csv.empty()) write_text_file(flow_csv, trajectory_csv(field, traj, integrals));
    emit(g, "flow", r.to_json());
    return status_of(r);
  }));

  // blowup
  auto* blowup_cmd = app.add_subcommand("blowup", "First crossing of straight-line characteristics");
  std::string blowup_model = "hopf", blowup_g0;
  double K1 = 0.0, K2 = 0.0, K3 = 0.0;
  int branch = 1, samples = 2048;
  blowup_cmd->add_option("--model", blowup_model, "hopf or cubic")
      ->check(CLI::IsMember({"hopf", "cubic"}))
      ->capture_default_str();
  blowup_cmd->add_option("--g0", blowup_g0, "Initial data as a field literal in x (default sin x)");
  blowup_cmd->add_option("--K1", K1, "Cubic model constant");
  blowup_cmd->add_option("--K2", K2, "Cubic model constant");
  blowup_cmd->add_option("--K3", K3, "Cubic model constant");
  blowup_cmd->add_option("--branch", branch, "Branch sign +1 or -1")->capture_default_str();
  blowup_cmd->add_option("--samples", samples, "Points on the transversal")->capture_default_str();
  blowup_cmd->callback(run([&] {
    std::function<double(double)> g0 = [](double x) { return std::sin(x); };
    if (!blowup_g0.empty()) {
      auto f = std::make_shared<TorusField>(field_from_json(read_json_file(blowup_g0)));
      g0 = [f](double x) { return f->value(x, 0.0); };
    }
    const CharField cf = blowup_model == "hopf" ? hopf_char_field(g0) : cubic_char_field(K1, K2, K3, branch, g0);
    emit(g, "blowup", blowup_to_json(characteristics_blowup(cf, samples)));
    return 0;
  }));

  // check
  auto* check_cmd = app.add_subcommand("check", "Run one named check battery");
  std::string check_name, check_spec, check_levels, check_probe;
  std::vector<std::string> check_perturb;
  int check_n = 8;
  bool check_full = false;
  check_cmd->add_option("name", check_name, "example1, degree3, degree4, appendix, dynamics or blowup")
      ->required()
      ->check(CLI::IsMember(check_names()));
  check_cmd->add_option("--spec", check_spec, "Family spec JSON");
  check_cmd->add_option("--levels", check_levels, "Comma-separated energy levels");
  check_cmd->add_option("--probe", check_probe, "Comma-separated probe levels");
  check_cmd->add_option("--perturb", check_perturb, "Coefficient shift key=value")->take_all();
  check_cmd->add_option("--n", check_n, "Degree for the appendix check")->capture_default_str();
  check_cmd->add_flag("--full-level-count", check_full, "Require N + 2 levels");
  check_cmd->callback(run([&] {
    CheckOptions opt;
    opt.tol = g.tol;
    opt.grid = g.grid;
    if (!check_spec.empty()) opt.spec = family_from_json(read_json_file(check_spec));
    opt.levels = parse_list(check_levels);
    opt.probe_levels = parse_list(check_probe);
    opt.full_level_count = check_full;
    opt.appendix_n = check_n;
    for (const auto& kv : check_perturb) opt.perturb.push_back(parse_perturb(kv));
    const CheckReport r = run_check(check_name, opt);
    emit(g, "check_" + check_name, r.to_json());
    return status_of(r);
  }));

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "Run every check battery");
  suite_cmd->callback(run([&] {
    CheckOptions opt;
    opt.tol = g.tol;
    opt.grid = g.grid;
    const SuiteResult s = run_check_suite(opt);
    emit(g, "suite", s.report);
    if (!s.passed) std::cerr << "FAIL suite\n";
    return s.passed ? 0 : 1;
  }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
