#include "qtd/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qtd::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

void require_keys(const Json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
}

namespace {

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double number(const Json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path_of(where, key), "must be a number");
  return v.get<double>();
}

double number_or(const Json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer_or(const Json& obj, const std::string& key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path_of(where, key), "must be an integer");
  return v.get<int>();
}

std::string string_or(const Json& obj, const std::string& key, const std::string& fallback,
                      const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path_of(where, key), "must be a string");
  return v.get<std::string>();
}

Axis parse_axis(const Json& j, Axis base, const std::string& where) {
  require_keys(j, {"min", "max", "n"}, where);
  base.lo = number_or(j, "min", base.lo, where);
  base.hi = number_or(j, "max", base.hi, where);
  base.n = integer_or(j, "n", base.n, where);
  base.validate(where.c_str());
  return base;
}

OracleConfig parse_oracle(const Json& j) {
  const std::string w = "oracle";
  require_keys(j, {"zeta", "r", "s_max", "s_compare", "nu_min", "nu_max", "n_modes", "rel_tol",
                   "abs_tol", "record_step", "renormalize_shift"},
               w);
  OracleConfig c;
  c.zeta = number_or(j, "zeta", c.zeta, w);
  c.r = number_or(j, "r", c.r, w);
  c.s_max = number_or(j, "s_max", c.s_max, w);
  c.s_compare = number_or(j, "s_compare", c.s_compare, w);
  const int grid_keys = static_cast<int>(j.contains("nu_min")) + j.contains("nu_max") + j.contains("n_modes");
  if (grid_keys != 0 && grid_keys != 3)
    throw ConfigError("oracle.nu_min", "nu_min, nu_max and n_modes go together");
  if (grid_keys == 3)
    c.grid = ModeGrid{number(j, "nu_min", w), number(j, "nu_max", w), integer_or(j, "n_modes", 0, w)};
  c.options.rel_tol = number_or(j, "rel_tol", c.options.rel_tol, w);
  c.options.abs_tol = number_or(j, "abs_tol", c.options.abs_tol, w);
  c.options.record_step = number_or(j, "record_step", c.options.record_step, w);
  if (j.contains("renormalize_shift")) {
    if (!j.at("renormalize_shift").is_boolean())
      throw ConfigError("oracle.renormalize_shift", "must be a boolean");
    c.options.renormalize_shift = j.at("renormalize_shift").get<bool>();
  }
  if (!(c.r > 0)) throw ConfigError("oracle.r", "must be > 0");
  if (!(c.zeta > -1)) throw ConfigError("oracle.zeta", "must exceed -1");
  if (!(c.s_max > 0)) throw ConfigError("oracle.s_max", "must be > 0");
  if (!(c.s_compare > 0)) throw ConfigError("oracle.s_compare", "must be > 0");
  if (!(c.options.rel_tol > 0 && c.options.rel_tol <= 1e-8))
    throw ConfigError("oracle.rel_tol", "must lie in (0, 1e-8]");
  if (!(c.options.abs_tol > 0)) throw ConfigError("oracle.abs_tol", "must be > 0");
  if (!(c.options.record_step > 0)) throw ConfigError("oracle.record_step", "must be > 0");
  return c;
}

SweepSpec parse_sweep(const Json& j) {
  const std::string w = "sweep";
  require_keys(j, {"panel", "delta_zeta", "fixed_angle", "separation", "angle", "order"}, w);
  const std::string panel = string_or(j, "panel", "a", w);
  SweepSpec s;
  if (panel == "a") s = SweepSpec::panel_a();
  else if (panel == "b") s = SweepSpec::panel_b();
  else if (panel == "c") s = SweepSpec::panel_c();
  else throw ConfigError("sweep.panel", "must be one of a, b, c");
  s.delta_zeta = number_or(j, "delta_zeta", s.delta_zeta, w);
  s.fixed_angle = number_or(j, "fixed_angle", s.fixed_angle, w);
  if (j.contains("separation")) s.separation = parse_axis(j.at("separation"), s.separation, "sweep.separation");
  if (j.contains("angle")) s.angle = parse_axis(j.at("angle"), s.angle, "sweep.angle");
  s.quadrature_order = integer_or(j, "order", s.quadrature_order, w);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("sweep." + e.field(), e.what());
  }
  return s;
}

TcohConfig parse_tcoh(const Json& j) {
  const std::string w = "tcoh";
  require_keys(j, {"sigma_z_m", "sigma_v_m_s", "p_bar_kg_m_s", "alpha", "phi_rad", "t_s", "mass_kg",
                   "z1_m", "z2_m"},
               w);
  TcohConfig c;
  c.params.sigma_z = number(j, "sigma_z_m", w);
  c.params.sigma_v = number(j, "sigma_v_m_s", w);
  c.params.p_bar = number_or(j, "p_bar_kg_m_s", 0, w);
  c.params.alpha_w = number(j, "alpha", w);
  c.params.phi = number_or(j, "phi_rad", 0, w);
  c.params.t = number_or(j, "t_s", 1e-8, w);
  c.params.m = number_or(j, "mass_kg", constants::kAtomicMassUnit, w);
  c.z1_m = number(j, "z1_m", w);
  c.z2_m = number(j, "z2_m", w);
  try {
    c.params.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("tcoh." + e.field(), e.what());
  }
  return c;
}

}  // namespace

PhysicalParams parse_params(const Json& j) {
  const std::string w = "params";
  require_keys(j, {"g", "c", "hbar", "eps0", "omega_rad_s", "gamma0_s", "dipole_Cm", "mass_kg"}, w);
  if (!j.contains("omega_rad_s")) throw ConfigError("params.omega_rad_s", "required");
  const bool has_gamma = j.contains("gamma0_s"), has_dipole = j.contains("dipole_Cm");
  if (has_gamma == has_dipole)
    throw ConfigError("params.gamma0_s", "give exactly one of gamma0_s and dipole_Cm");
  PhysicalParams p;
  p.g = number_or(j, "g", p.g, w);
  p.c = number_or(j, "c", p.c, w);
  p.hbar = number_or(j, "hbar", p.hbar, w);
  p.eps0 = number_or(j, "eps0", p.eps0, w);
  p.omega = number(j, "omega_rad_s", w);
  p.mass = number_or(j, "mass_kg", p.mass, w);
  if (has_gamma) {
    p.gamma0 = number(j, "gamma0_s", w);
  } else {
    p.dipole = number(j, "dipole_Cm", w);
    p.gamma0 = derive_gamma0(p.omega, *p.dipole, p.hbar, p.c, p.eps0);
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("params." + e.field(), e.what());
  }
  return p;
}

StateSpec parse_state(const Json& j, const DimensionlessScales& sc) {
  const std::string w = "state";
  require_keys(j, {"kind", "z1_m", "z2_m", "delta_m", "zeta1", "zeta2", "delta_zeta", "theta_rad", "phi_rad"}, w);
  const std::string kind = string_or(j, "kind", "superposition", w);
  if (kind != "superposition" && kind != "mixture")
    throw ConfigError("state.kind", "must be superposition or mixture");
  const bool si = j.contains("z1_m") || j.contains("z2_m") || j.contains("delta_m");
  const bool dimless = j.contains("zeta1") || j.contains("zeta2") || j.contains("delta_zeta");
  if (si == dimless) throw ConfigError("state.z1_m", "give either z1_m/z2_m/delta_m or zeta1/zeta2/delta_zeta");
  Superposition<double> s;
  if (si) {
    s.z1 = sc.zeta(number(j, "z1_m", w));
    s.z2 = sc.zeta(number(j, "z2_m", w));
    s.delta = sc.zeta(number(j, "delta_m", w));
  } else {
    s.z1 = number(j, "zeta1", w);
    s.z2 = number(j, "zeta2", w);
    s.delta = number(j, "delta_zeta", w);
  }
  s.theta = number(j, "theta_rad", w);
  if (kind == "mixture") {
    if (j.contains("phi_rad")) throw ConfigError("state.phi_rad", "a mixture has no phase");
  } else {
    s.phi = number_or(j, "phi_rad", 0, w);
  }
  try {
    validate(s);
  } catch (const ConfigError& e) {
    throw ConfigError("state." + e.field(), e.what());
  }
  if (kind == "mixture") return matched_mixture(s);
  return s;
}

QuadratureSpec parse_quadrature(const Json& j, QuadratureSpec q) {
  const std::string w = "quadrature";
  require_keys(j, {"method", "order", "rel_tol", "abs_tol", "max_subdivisions"}, w);
  const std::string method = string_or(j, "method", q.method == QuadratureMethod::Adaptive ? "adaptive" : "gauss-hermite", w);
  if (method == "adaptive") q.method = QuadratureMethod::Adaptive;
  else if (method == "gauss-hermite") q.method = QuadratureMethod::GaussHermite;
  else throw ConfigError("quadrature.method", "must be gauss-hermite or adaptive");
  q.order = integer_or(j, "order", q.order, w);
  q.rel_tol = number_or(j, "rel_tol", q.rel_tol, w);
  q.abs_tol = number_or(j, "abs_tol", q.abs_tol, w);
  q.max_subdivisions = integer_or(j, "max_subdivisions", q.max_subdivisions, w);
  try {
    q.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("quadrature." + e.field(), e.what());
  }
  return q;
}

RunConfig parse_run_config(const Json& j) {
  RunConfig c;
  if (j.is_null()) return c;
  require_keys(j, {"preset", "params", "state", "states", "quadrature", "rate", "spectrum", "survival",
                   "oracle", "sweep", "tcoh", "seed"},
               "");
  if (j.contains("preset") && j.contains("params"))
    throw ConfigError("preset", "give either preset or params");
  if (j.contains("preset")) {
    if (string_or(j, "preset", "", "") != "earth-aluminium")
      throw ConfigError("preset", "unknown preset (known: earth-aluminium)");
  }
  if (j.contains("params")) c.params = parse_params(j.at("params"));
  const auto sc = DimensionlessScales::from(c.params);

  if (j.contains("state") && j.contains("states")) throw ConfigError("state", "give either state or states");
  if (j.contains("state")) c.states.push_back(parse_state(j.at("state"), sc));
  if (j.contains("states")) {
    if (!j.at("states").is_array()) throw ConfigError("states", "must be an array");
    for (const auto& s : j.at("states")) c.states.push_back(parse_state(s, sc));
  }
  if (j.contains("quadrature")) c.quadrature = parse_quadrature(j.at("quadrature"), QuadratureSpec{});
  if (j.contains("rate")) {
    require_keys(j.at("rate"), {"method"}, "rate");
    const std::string m = string_or(j.at("rate"), "method", "closed-form", "rate");
    if (m == "closed-form") c.rate_method = RateMethod::ClosedForm;
    else if (m == "quadrature") c.rate_method = RateMethod::Quadrature;
    else throw ConfigError("rate.method", "must be closed-form or quadrature");
  }
  if (j.contains("spectrum")) {
    c.spectrum_nu = parse_axis(j.at("spectrum"), c.spectrum_nu, "spectrum");
    if (c.spectrum_nu.n < 2) throw ConfigError("spectrum.n", "must be >= 2");
  }
  if (j.contains("survival")) {
    c.survival_s = parse_axis(j.at("survival"), c.survival_s, "survival");
    if (c.survival_s.lo < 0) throw ConfigError("survival.min", "must be >= 0");
  }
  if (j.contains("oracle")) c.oracle = parse_oracle(j.at("oracle"));
  if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));
  if (j.contains("tcoh")) c.tcoh = parse_tcoh(j.at("tcoh"));
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("out", "failed writing " + path.string());
}

std::string rate_json(const RateResult& r) {
  std::ostringstream o;
  o << "{\"gamma_sup\": " << format_double(r.gamma_sup) << ", \"gamma_cl\": " << format_double(r.gamma_cl)
    << ", \"gammaQ_inv\": " << format_double(r.gammaQ_inv) << ", \"method\": \"" << to_string(r.method)
    << "\"}\n";
  return o.str();
}

namespace {
std::string two_columns(const char* header, const std::vector<double>& a, const std::vector<double>& b) {
  std::string out = header;
  out += '\n';
  for (std::size_t i = 0; i < a.size(); ++i) {
    out += format_double(a[i]);
    out += ',';
    out += format_double(b[i]);
    out += '\n';
  }
  return out;
}
}  // namespace

std::string spectrum_csv(const SpectrumResult& s) { return two_columns("nu,p", s.nu, s.p); }

std::string survival_csv(const std::vector<double>& s, const std::vector<double>& p) {
  return two_columns("s,p", s, p);
}

std::string oracle_alpha_csv(const OracleRun& run) { return two_columns("s,alpha_sq", run.times, run.alpha_sq); }

std::string oracle_beta_csv(const OracleRun& run) { return two_columns("nu,beta_sq", run.nu, run.beta_sq_final); }

std::string oracle_summary_json(const SinglePoleReport& rep) {
  std::ostringstream o;
  o << "{\"zeta\": " << format_double(rep.run.zeta) << ", \"r\": " << format_double(rep.run.r)
    << ", \"fitted_rate\": " << format_double(rep.run.fitted_rate)
    << ", \"fit_residual\": " << format_double(rep.run.fit_residual)
    << ", \"max_deviation_single_pole\": " << format_double(rep.max_deviation)
    << ", \"truncated\": " << (rep.truncated ? "true" : "false")
    << ", \"norm_error\": " << format_double(rep.run.norm_error)
    << ", \"line_shift\": " << format_double(rep.run.line_shift) << "}\n";
  return o.str();
}

std::string figure1_csv(const std::vector<SweepRow>& rows) {
  std::string out = "theta,phi,dz,gammaQ_inv\n";
  for (const auto& r : rows)
    out += format_double(r.theta) + ',' + format_double(r.phi) + ',' + format_double(r.dz) + ',' +
           format_double(r.gammaQ_inv) + '\n';
  return out;
}

std::string figure2_csv(const LinePair& lines) {
  std::string out = "nu,p_sup,p_cl\n";
  for (std::size_t i = 0; i < lines.sup.nu.size(); ++i)
    out += format_double(lines.sup.nu[i]) + ',' + format_double(lines.sup.p[i]) + ',' +
           format_double(lines.cl.p[i]) + '\n';
  return out;
}

std::string scan_json(const ScanReport& rep) {
  std::ostringstream o;
  o << "{\"max_gammaQ\": " << format_double(rep.max_gammaQ) << ", \"theta_star\": " << format_double(rep.theta_star)
    << ", \"phi_star\": " << format_double(rep.phi_star) << ", \"dz_star\": " << format_double(rep.dz_star)
    << ", \"ratio_to_quarter_delta\": " << format_double(rep.ratio_to_quarter_delta) << "}\n";
  return o.str();
}

std::string tcoh_json(const CoherenceTerms& full, double reduced, const TermReport& report) {
  std::ostringstream o;
  o << "{\"term1\": " << format_double(full.term1) << ", \"term2\": " << format_double(full.term2)
    << ", \"term3\": " << format_double(full.term3) << ", \"term3_factor\": " << format_double(full.term3_factor)
    << ", \"normalization\": " << format_double(full.normalization)
    << ", \"t_coh_s\": " << format_double(full.t_coh) << ", \"gammaQ_inv_reduced\": " << format_double(reduced)
    << ", \"reference\": {\"sigma_z_m\": " << format_double(report.sigma_z_m)
    << ", \"sigma_v_m_s\": " << format_double(report.sigma_v) << ", \"v2_over_c2\": " << format_double(report.v2_over_c2)
    << ", \"term1\": " << format_double(report.term1) << ", \"term2\": " << format_double(report.term2)
    << ", \"term3_bound\": " << format_double(report.term3_bound) << "}}\n";
  return o.str();
}

}  // namespace qtd::io
