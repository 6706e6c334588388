#include "qtd/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qtd/io.hpp"

namespace qtd {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out = ".";
  std::string preset;
  std::optional<int> quad_order;
  std::optional<double> tol;
};

struct Context {
  io::RunConfig cfg;
  fs::path out;
  GlobalOptions opts;
  std::ostream& stdout_;
  std::ostream& stderr_;

  QuadratureSpec quadrature(QuadratureSpec base) const {
    QuadratureSpec q = cfg.quadrature.value_or(base);
    if (opts.quad_order) {
      q.method = QuadratureMethod::GaussHermite;
      q.order = *opts.quad_order;
    }
    if (opts.tol) q.rel_tol = *opts.tol;
    try {
      q.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.field() == "order" ? "--quad-order" : "--tol", e.what());
    }
    return q;
  }

  fs::path file(const std::string& stem, std::size_t index, std::size_t count, const std::string& ext) const {
    return out / (count == 1 ? stem + ext : stem + "_" + std::to_string(index) + ext);
  }
};

std::string sig12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return buf;
}

void require_states(const Context& c) {
  if (c.cfg.states.empty()) throw ConfigError("state", "required for this command");
}

HeightDensity density_of(const StateSpec& s) {
  if (const auto* sup = std::get_if<SuperpositionSpec>(&s)) return HeightDensity::superposition(*sup);
  return HeightDensity::mixture(std::get<MixtureSpec>(s));
}

void cmd_rate(Context& c) {
  require_states(c);
  const RateMethod method = c.cfg.rate_method.value_or(RateMethod::ClosedForm);
  const auto q = c.quadrature(QuadratureSpec::gauss_hermite());
  for (std::size_t i = 0; i < c.cfg.states.size(); ++i) {
    const auto* sup = std::get_if<SuperpositionSpec>(&c.cfg.states[i]);
    if (!sup) throw ConfigError("state.kind", "rate compares a superposition with its mixture");
    const RateResult r = rate_result(*sup, method, q);
    io::write_text(c.file("rate", i, c.cfg.states.size(), ".json"), io::rate_json(r));
    c.stdout_ << sig12(r.gammaQ_inv) << '\n';
  }
}

void cmd_spectrum(Context& c) {
  require_states(c);
  const auto q = c.quadrature(QuadratureSpec::adaptive(1e-10));
  const double r = c.cfg.params.frequency_ratio();
  const auto grid = c.cfg.spectrum_nu.values();
  for (std::size_t i = 0; i < c.cfg.states.size(); ++i) {
    const SpectrumResult s = spectrum(density_of(c.cfg.states[i]), r, grid, q);
    io::write_text(c.file("spectrum", i, c.cfg.states.size(), ".csv"), io::spectrum_csv(s));
    if (s.mass_warning)
      c.stderr_ << "warning: spectrum " << i << " holds only " << sig12(s.total_mass)
                << " of the line on the requested grid\n";
  }
}

void cmd_survival(Context& c) {
  require_states(c);
  const auto s = c.cfg.survival_s.values();
  for (std::size_t i = 0; i < c.cfg.states.size(); ++i) {
    const auto d = density_of(c.cfg.states[i]);
    std::vector<double> p;
    p.reserve(s.size());
    for (double si : s) p.push_back(survival_probability(d, si));
    io::write_text(c.file("survival", i, c.cfg.states.size(), ".csv"), io::survival_csv(s, p));
  }
}

void cmd_oracle(Context& c) {
  const auto& o = c.cfg.oracle;
  const ModeGrid grid = o.grid.value_or(ModeGrid::standard(o.zeta, o.r));
  const SinglePoleReport rep = validate_single_pole(o.zeta, o.r, grid, o.s_max, o.s_compare, o.options);
  io::write_text(c.out / "oracle_alpha.csv", io::oracle_alpha_csv(rep.run));
  io::write_text(c.out / "oracle_beta.csv", io::oracle_beta_csv(rep.run));
  io::write_text(c.out / "oracle_summary.json", io::oracle_summary_json(rep));
  c.stdout_ << "fitted_rate " << sig12(rep.run.fitted_rate) << " max_deviation " << sig12(rep.max_deviation)
            << (rep.truncated ? " (comparison truncated at 0.8 recurrence)" : "") << '\n';
  if (rep.run.norm_error > 1e-6)
    throw IntegrationError("unitarity violated: norm error " + sig12(rep.run.norm_error));
}

void cmd_sweep(Context& c) {
  SweepSpec spec = c.cfg.sweep.value_or(SweepSpec::panel_a());
  if (c.opts.quad_order) spec.quadrature_order = *c.opts.quad_order;
  io::write_text(c.out / "sweep.csv", io::figure1_csv(figure1_sweep(spec)));
}

void cmd_figures(Context& c) {
  const std::pair<char, SweepSpec> panels[] = {
      {'a', SweepSpec::panel_a()}, {'b', SweepSpec::panel_b()}, {'c', SweepSpec::panel_c()}};
  for (auto [name, spec] : panels) {
    if (c.opts.quad_order) spec.quadrature_order = *c.opts.quad_order;
    io::write_text(c.out / (std::string("figure1_") + name + ".csv"), io::figure1_csv(figure1_sweep(spec)));
  }
  const auto q = c.quadrature(QuadratureSpec::adaptive(1e-10));
  for (char name : {'a', 'b', 'c', 'd'}) {
    const LinePair lines = figure2_lines(LineCase::figure2(name), q);
    io::write_text(c.out / (std::string("figure2_") + name + ".csv"), io::figure2_csv(lines));
  }
  io::write_text(c.out / "scan.json", io::scan_json(optimal_state_scan(ScanSpec::defaults(0.01))));
}

void cmd_tcoh(Context& c) {
  const TermReport ref = term_magnitude_report(c.cfg.params.mass);
  io::TcohConfig t;
  if (c.cfg.tcoh) {
    t = *c.cfg.tcoh;
  } else {
    t.params.sigma_z = ref.sigma_z_m;
    t.params.sigma_v = ref.sigma_v;
    t.params.alpha_w = 0.8535533905932737;
    t.params.t = 1e-8;
    t.params.m = c.cfg.params.mass;
    t.z2_m = ref.separation_m;
  }
  ClockConstants k;
  k.g = c.cfg.params.g;
  k.c = c.cfg.params.c;
  k.hbar = c.cfg.params.hbar;
  const CoherenceTerms full = coherence_time_full(t.params, t.z1_m, t.z2_m, k);
  const double reduced = coherence_time_reduced(t.params, t.z1_m, t.z2_m, k);
  io::write_text(c.out / "tcoh.json", io::tcoh_json(full, reduced, ref));
  c.stdout_ << sig12(full.t_coh) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decay rate and emission line of an atom in a spatial superposition under gravity"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::optional<int> quad_order;
  std::optional<double> tol;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Existing output directory");
  app.add_option("--preset", g.preset, "Named parameter set (earth-aluminium)");
  app.add_option("--quad-order", quad_order, "Gauss-Hermite node count");
  app.add_option("--tol", tol, "Relative quadrature tolerance");

  using Command = void (*)(Context&);
  const std::pair<const char*, std::pair<const char*, Command>> commands[] = {
      {"rate", {"Superposition vs mixture decay rates", cmd_rate}},
      {"spectrum", {"Emission line on a detuning grid", cmd_spectrum}},
      {"survival", {"Excited-state survival probability", cmd_survival}},
      {"oracle", {"Wigner-Weisskopf time-domain check of the single-pole result", cmd_oracle}},
      {"sweep", {"One rate-difference surface", cmd_sweep}},
      {"figures", {"All default figure tables", cmd_figures}},
      {"tcoh", {"Coherence contribution to the clock time", cmd_tcoh}},
  };
  Command chosen = nullptr;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    sub->callback([&chosen, f = entry.second] { chosen = f; });
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }
  g.quad_order = quad_order;
  g.tol = tol;

  try {
    const fs::path out_dir = g.out;
    if (!fs::is_directory(out_dir)) throw ConfigError("--out", "output directory does not exist: " + g.out);
    io::Json j;
    if (!g.config.empty()) j = io::load_json(g.config);
    if (!g.preset.empty()) {
      if (g.preset != "earth-aluminium") throw ConfigError("--preset", "unknown preset (known: earth-aluminium)");
      if (j.is_object() && j.contains("params")) throw ConfigError("--preset", "conflicts with params in the config");
    }
    Context c{io::parse_run_config(j), out_dir, g, out, err};
    chosen(c);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidityError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationError& e) {
    err << "integration error: " << e.what() << '\n';
    return kExitIntegration;
  } catch (const AccuracyError& e) {
    err << "integration error: " << e.what() << " (estimate " << e.estimate() << ", error bound "
        << e.error_bound() << ")\n";
    return kExitIntegration;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace qtd
