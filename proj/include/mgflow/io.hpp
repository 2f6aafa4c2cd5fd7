#pragma once

// JSON and CSV formats.
//
//   field literal   [{"k1": 0, "k2": 1, "re": 0.5, "im": 0.0}, ...]
//   polynomial      {"m1,m2": <field literal>, ...}
//   family spec     {"degree": 3, "lambda": <field>, "f1": <field>,
//                    "constants": {"K1": 1, "s0": 1, ...}}
//
// Emitted JSON has sorted keys and modes sorted by (k1, k2) so identical
// input gives byte-identical output.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mgflow/dynamics.hpp"
#include "mgflow/energy_level.hpp"
#include "mgflow/families.hpp"
#include "mgflow/momentum_poly.hpp"

namespace mgflow {

using json = nlohmann::json;

inline json field_to_json(const TorusField& f) {
  json arr = json::array();
  // + 0.0 turns -0.0 into 0.0
  for (const auto& m : f.modes())
    arr.push_back({{"k1", m.k1}, {"k2", m.k2}, {"re", m.amplitude.real() + 0.0}, {"im", m.amplitude.imag() + 0.0}});
  return arr;
}

/// Accepts a literal array, or a bare number for a constant field.
inline TorusField field_from_json(const json& j) {
  if (j.is_number()) return TorusField::constant(j.get<double>());
  if (!j.is_array()) throw PreconditionError("field literal must be an array of modes or a number");
  std::vector<Mode> modes;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("k1") || !e.contains("k2"))
      throw PreconditionError("field mode needs k1 and k2");
    const double re = e.value("re", 0.0), im = e.value("im", 0.0);
    if (!std::isfinite(re) || !std::isfinite(im)) throw PreconditionError("field mode not finite");
    modes.push_back({e.at("k1").get<int>(), e.at("k2").get<int>(), Complex(re, im)});
  }
  return TorusField::from_modes(modes);
}

inline json poly_to_json(const MomentumPolynomial& p) {
  json o = json::object();
  for (const auto& [e, c] : p.terms())
    o[std::to_string(e.m1) + "," + std::to_string(e.m2)] = field_to_json(c);
  return o;
}

inline MomentumPolynomial poly_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("polynomial must be an object keyed \"m1,m2\"");
  MomentumPolynomial p;
  for (const auto& [key, val] : j.items()) {
    const auto comma = key.find(',');
    if (comma == std::string::npos) throw PreconditionError("bad exponent key '" + key + "'");
    int m1 = 0, m2 = 0;
    try {
      m1 = std::stoi(key.substr(0, comma));
      m2 = std::stoi(key.substr(comma + 1));
    } catch (const std::exception&) {
      throw PreconditionError("bad exponent key '" + key + "'");
    }
    if (m1 < 0 || m2 < 0) throw PreconditionError("negative exponent in '" + key + "'");
    p.add_to(m1, m2, field_from_json(val));
  }
  return p;
}

inline json constants_to_json(const FamilyConstants& k) {
  return {{"K1", k.K1}, {"K3", k.K3}, {"s0", k.s0}, {"s1", k.s1},
          {"s2", k.s2}, {"s3", k.s3}, {"s5", k.s5}, {"s6", k.s6}};
}

inline FamilyConstants constants_from_json(const json& j) {
  static const char* known[] = {"K1", "K3", "s0", "s1", "s2", "s3", "s5", "s6"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw PreconditionError("unknown family constant '" + key + "'");
  }
  FamilyConstants k;
  k.K1 = j.value("K1", 0.0);
  k.K3 = j.value("K3", 0.0);
  k.s0 = j.value("s0", 0.0);
  k.s1 = j.value("s1", 0.0);
  k.s2 = j.value("s2", 0.0);
  k.s3 = j.value("s3", 0.0);
  k.s5 = j.value("s5", 0.0);
  k.s6 = j.value("s6", 0.0);
  return k;
}

inline json family_to_json(const FamilySpec& s) {
  return {{"degree", s.degree},
          {"lambda", field_to_json(s.lambda)},
          {"f1", field_to_json(s.f1)},
          {"constants", constants_to_json(s.constants)}};
}

inline FamilySpec family_from_json(const json& j) {
  FamilySpec s;
  s.degree = j.at("degree").get<int>();
  s.lambda = field_from_json(j.at("lambda"));
  s.f1 = field_from_json(j.at("f1"));
  if (j.contains("constants")) s.constants = constants_from_json(j.at("constants"));
  s.validate();
  return s;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw PreconditionError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << text;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// t,x,y,phi followed by one column per integral.
inline std::string trajectory_csv(const FlowField& field, const Trajectory& traj,
                                  const std::vector<std::pair<std::string, MomentumPolynomial>>& integrals) {
  std::ostringstream os;
  os << "t,x,y,phi";
  std::vector<std::vector<double>> cols;
  for (const auto& [name, F] : integrals) {
    os << ',' << name;
    cols.push_back(integral_series(field, traj, F));
  }
  os << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_double(traj.times[i]);
    for (double v : traj.states[i]) os << ',' << format_double(v);
    for (const auto& c : cols) os << ',' << format_double(c[i]);
    os << '\n';
  }
  return os.str();
}

/// level,sqrtC,mode,max_amplitude for every sampled level and mode.
inline std::string level_modes_csv(const std::vector<LevelModes>& samples) {
  std::ostringstream os;
  os << "level,sqrtC,mode,max_amplitude\n";
  for (const auto& s : samples)
    for (int k = -s.max_mode; k <= s.max_mode; ++k)
      os << format_double(s.level) << ',' << format_double(std::sqrt(s.level)) << ',' << k << ','
         << format_double(s.max_amplitude(k)) << '\n';
  return os.str();
}

inline json blowup_to_json(const BlowupResult& r) {
  json j = {{"outcome", to_string(r.kind)}};
  if (r.kind == BlowupResult::Kind::blowup) {
    j["T_star"] = r.time;
    j["pair_indices"] = {r.pair_first, r.pair_second};
    j["g_values"] = {r.g_first, r.g_second};
  }
  return j;
}

}  // namespace mgflow
