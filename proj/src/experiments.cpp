#include "qtd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qtd {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double wrap_phase(double phi) { return phi >= kTwoPi ? phi - kTwoPi : phi; }

template <typename F>
double golden_max(F&& f, double lo, double hi, int iterations = 80) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1 + std::abs(a)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

std::vector<double> Axis::values() const {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = at(k);
  return v;
}

void Axis::validate(const char* field) const {
  if (n < 1) throw ConfigError(field, "axis needs at least one sample");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError(field, "axis bounds must be finite");
  if (n > 1 && !(hi > lo)) throw ConfigError(field, "axis needs hi > lo");
}

void SweepSpec::validate() const {
  if (!(delta_zeta > 0)) throw ConfigError("delta_zeta", "must be > 0");
  separation.validate("separation");
  angle.validate("angle");
  if (quadrature_order < 2) throw ConfigError("quadrature_order", "must be >= 2");
  if (panel == SweepPanel::PhiSeparation) {
    if (angle.lo < 0 || angle.hi > kTwoPi) throw ConfigError("angle", "phi must lie in [0, 2pi]");
    if (fixed_angle < 0 || fixed_angle > std::numbers::pi / 2)
      throw ConfigError("fixed_angle", "theta must lie in [0, pi/2]");
  } else {
    if (angle.lo < 0 || angle.hi > std::numbers::pi / 2)
      throw ConfigError("angle", "theta must lie in [0, pi/2]");
    if (fixed_angle < 0 || fixed_angle >= kTwoPi) throw ConfigError("fixed_angle", "phi must lie in [0, 2pi)");
  }
}

SweepSpec SweepSpec::panel_a() { return {}; }

SweepSpec SweepSpec::panel_b() {
  SweepSpec s;
  s.panel = SweepPanel::ThetaSeparation;
  s.fixed_angle = 0;
  s.angle = {0, std::numbers::pi / 2, 201};
  return s;
}

SweepSpec SweepSpec::panel_c() {
  SweepSpec s = panel_b();
  s.fixed_angle = std::numbers::pi;
  return s;
}

std::vector<SweepRow> figure1_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto q = QuadratureSpec::gauss_hermite(spec.quadrature_order);
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(spec.separation.n) * spec.angle.n);
  for (int i = 0; i < spec.separation.n; ++i) {
    const double dz = spec.separation.at(i);
    for (int j = 0; j < spec.angle.n; ++j) {
      const double a = spec.angle.at(j);
      const bool phi_swept = spec.panel == SweepPanel::PhiSeparation;
      const double theta = phi_swept ? spec.fixed_angle : a;
      const double phi = phi_swept ? a : spec.fixed_angle;
      const Superposition<long double> s{0.0L, dz, spec.delta_zeta, theta, wrap_phase(phi)};
      // Coincident packets in antiphase cancel: no state, no value.
      const bool empty = 1 + interference_weight(s) <= 0;
      const double v = empty ? std::numeric_limits<double>::quiet_NaN()
                             : static_cast<double>(quantum_correction_quadrature(s, q));
      rows.push_back({theta, phi, dz, v});
    }
  }
  return rows;
}

void LineCase::validate() const {
  if (!(delta_zeta > 0)) throw ConfigError("delta_zeta", "must be > 0");
  if (!(r > 0)) throw ConfigError("r", "must be > 0");
  if (nu.n < 2) throw ConfigError("nu", "grid needs at least two points");
  nu.validate("nu");
  qtd::validate(Superposition<double>{zeta1, zeta2, delta_zeta, theta, phi});
}

LineCase LineCase::figure2(char panel) {
  LineCase c;
  double half = 0;
  switch (panel) {
    case 'a': half = 2e-18; break;
    case 'b': half = 6e-18; break;
    case 'c':
    case 'd': half = 1e-17; break;
    default: throw ConfigError("panel", "must be one of a, b, c, d");
  }
  c.zeta1 = -half;
  c.zeta2 = half;
  c.delta_zeta = panel == 'd' ? half / 2 : half;
  return c;
}

LinePair figure2_lines(const LineCase& c, const QuadratureSpec& q) {
  c.validate();
  const Superposition<double> s{c.zeta1, c.zeta2, c.delta_zeta, c.theta, c.phi};
  const auto grid = c.nu.values();
  return {spectrum(HeightDensity::superposition(s), c.r, grid, q),
          spectrum(HeightDensity::mixture(matched_mixture(s)), c.r, grid, q)};
}

std::vector<double> local_maxima(const SpectrumResult& s) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < s.p.size(); ++i) {
    const double y0 = s.p[i - 1], y1 = s.p[i], y2 = s.p[i + 1];
    if (!(y1 > y0 && y1 >= y2)) continue;
    const double x0 = s.nu[i - 1], x1 = s.nu[i], x2 = s.nu[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    out.push_back(curvature < 0 ? (x0 + x1) / 2 - d01 / (2 * curvature) : x1);
  }
  return out;
}

double max_difference(const SpectrumResult& a, const SpectrumResult& b) {
  if (a.nu != b.nu) throw ContractViolation("max_difference: spectra must share a grid");
  double m = 0;
  for (std::size_t i = 0; i < a.p.size(); ++i) m = std::max(m, std::abs(a.p[i] - b.p[i]));
  return m;
}

void ScanSpec::validate() const {
  if (!(delta_zeta > 0)) throw ConfigError("delta_zeta", "must be > 0");
  if (theta.empty()) throw ConfigError("theta", "grid must be nonempty");
  if (phi.empty()) throw ConfigError("phi", "grid must be nonempty");
  if (separation.empty()) throw ConfigError("separation", "grid must be nonempty");
  for (double t : theta)
    if (!(t >= 0 && t <= std::numbers::pi / 2)) throw ConfigError("theta", "values must lie in [0, pi/2]");
  for (double p : phi)
    if (!(p >= 0 && p < kTwoPi)) throw ConfigError("phi", "values must lie in [0, 2pi)");
  for (double d : separation)
    if (!std::isfinite(d)) throw ConfigError("separation", "values must be finite");
  if (!std::is_sorted(theta.begin(), theta.end()) || !std::is_sorted(phi.begin(), phi.end()) ||
      !std::is_sorted(separation.begin(), separation.end()))
    throw ConfigError("grid", "scan grids must be sorted");
  if (refine_sweeps < 0) throw ConfigError("refine_sweeps", "must be >= 0");
}

ScanSpec ScanSpec::defaults(double delta_zeta) {
  ScanSpec s;
  s.delta_zeta = delta_zeta;
  s.theta = Axis{0, std::numbers::pi / 2, 91}.values();
  for (int k = 0; k < 72; ++k) s.phi.push_back(kTwoPi * k / 72);
  s.separation = Axis{0.01, 6, 600}.values();
  return s;
}

ScanReport optimal_state_scan(const ScanSpec& spec) {
  spec.validate();
  const double delta = spec.delta_zeta;
  auto value = [delta](double theta, double phi, double sep) {
    return quantum_correction(Superposition<double>{0, sep * delta, delta, theta, phi});
  };

  std::size_t bt = 0, bp = 0, bs = 0;
  double best = -1;
  for (std::size_t i = 0; i < spec.theta.size(); ++i)
    for (std::size_t j = 0; j < spec.phi.size(); ++j)
      for (std::size_t k = 0; k < spec.separation.size(); ++k) {
        const double v = std::abs(value(spec.theta[i], spec.phi[j], spec.separation[k]));
        if (v > best) {
          best = v;
          bt = i;
          bp = j;
          bs = k;
        }
      }

  // Refine inside the best coarse cell, one coordinate at a time.
  auto cell = [](const std::vector<double>& g, std::size_t i) {
    return std::pair{g[i == 0 ? 0 : i - 1], g[std::min(i + 1, g.size() - 1)]};
  };
  const auto [t_lo, t_hi] = cell(spec.theta, bt);
  const auto [p_lo, p_hi] = cell(spec.phi, bp);
  const auto [s_lo, s_hi] = cell(spec.separation, bs);
  double theta = spec.theta[bt], phi = spec.phi[bp], sep = spec.separation[bs];
  for (int sweep = 0; sweep < spec.refine_sweeps; ++sweep) {
    if (t_hi > t_lo) {
      const double x = golden_max([&](double t) { return std::abs(value(t, phi, sep)); }, t_lo, t_hi);
      if (std::abs(value(x, phi, sep)) > std::abs(value(theta, phi, sep))) theta = x;
    }
    if (p_hi > p_lo) {
      const double x = golden_max([&](double p) { return std::abs(value(theta, p, sep)); }, p_lo, p_hi);
      if (std::abs(value(theta, x, sep)) > std::abs(value(theta, phi, sep))) phi = x;
    }
    if (s_hi > s_lo) {
      const double x = golden_max([&](double s) { return std::abs(value(theta, phi, s)); }, s_lo, s_hi);
      if (std::abs(value(theta, phi, x)) > std::abs(value(theta, phi, sep))) sep = x;
    }
  }

  ScanReport rep;
  rep.max_gammaQ = value(theta, phi, sep);
  rep.theta_star = theta;
  rep.phi_star = phi;
  rep.dz_star = sep * delta;
  rep.ratio_to_quarter_delta = std::abs(rep.max_gammaQ) / (delta / 4);
  return rep;
}

TermReport term_magnitude_report(double mass, double t_max, double alpha, const ClockConstants& k) {
  TermReport rep;
  rep.separation_m = 1e-18 * k.c * k.c / k.g;
  rep.sigma_z_m = rep.separation_m;
  rep.sigma_v = k.hbar / (mass * rep.sigma_z_m);
  rep.v2_over_c2 = rep.sigma_v * rep.sigma_v / (k.c * k.c);
  CoherenceParams kp;
  kp.sigma_z = rep.sigma_z_m;
  kp.sigma_v = rep.sigma_v;
  kp.p_bar = 0;
  kp.alpha_w = alpha;
  kp.phi = 0;
  kp.t = t_max;
  kp.m = mass;
  const auto terms = coherence_time_full(kp, 0, rep.separation_m, k);
  rep.term1 = terms.term1;
  rep.term2 = terms.term2;
  rep.term3_bound = std::abs(terms.term3_factor);
  return rep;
}

}  // namespace qtd
