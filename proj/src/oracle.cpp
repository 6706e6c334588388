#include "qtd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

namespace boost::numeric::odeint {
// The generic Eigen adaptor reports the norm in the scalar type, which is
// complex here; step-size control needs a real.
template <>
struct vector_space_norm_inf<Eigen::VectorXcd> {
  using result_type = double;
  double operator()(const Eigen::VectorXcd& x) const { return x.cwiseAbs().maxCoeff(); }
};
}  // namespace boost::numeric::odeint

namespace qtd {

namespace {
constexpr double kMarginLinewidths = 25;
constexpr double kMaxSpacing = 0.05;
constexpr double kFitStart = 0.5;
constexpr double kFitEnd = 5;
constexpr double kRecurrenceShare = 0.8;
}  // namespace

ModeGrid ModeGrid::centered(double centre, double half_width, int n_modes) {
  if (!(half_width > 0)) throw ConfigError("half_width", "must be > 0");
  if (n_modes < 2) throw ConfigError("n_modes", "must be >= 2");
  return {centre - half_width, centre + half_width, n_modes};
}

ModeGrid ModeGrid::standard(double zeta, double r) {
  const double width = local_rate(zeta);
  const double half_width = width * std::max(0.1 * r, kMarginLinewidths);
  const double spacing = std::min(0.025 * width, kMaxSpacing);
  const int n = 2 * static_cast<int>(std::ceil(half_width / spacing)) + 1;
  return centered(r * zeta, half_width, n);
}

void ModeGrid::validate(double zeta, double r) const {
  if (n_modes < 2) throw ConfigError("n_modes", "must be >= 2");
  if (!(nu_max > nu_min)) throw ConfigError("nu_max", "must exceed nu_min");
  const double u = r * zeta;
  const double margin = kMarginLinewidths * local_rate(zeta);
  if (u - nu_min < margin || nu_max - u < margin)
    throw ConfigError("window", "must hold the line centre with a 25-linewidth margin");
  if (spacing() > kMaxSpacing * (1 + 1e-12)) throw ConfigError("n_modes", "mode spacing must be <= 0.05");
  if (!(1 + nu_min / r > 0)) throw ConfigError("nu_min", "mode frequencies must be positive");
}

double OracleRun::recurrence_time() const { return 2 * std::numbers::pi / dnu; }

OracleRun ww_simulate(double zeta, double r, const ModeGrid& grid, double s_max,
                      const OracleOptions& opts) {
  using State = Eigen::VectorXcd;
  namespace odeint = boost::numeric::odeint;
  const double width = local_rate(zeta);
  if (!(r > 0)) throw ConfigError("r", "must be > 0");
  if (!(s_max > 0)) throw ConfigError("s_max", "must be > 0");
  if (!(opts.record_step > 0)) throw ConfigError("record_step", "must be > 0");
  grid.validate(zeta, r);

  const int n = grid.n_modes;
  const double dnu = grid.spacing();
  const double u = r * zeta;
  Eigen::VectorXd nu(n), detuning(n), coupling(n);
  for (int j = 0; j < n; ++j) {
    nu(j) = grid.nu(j);
    // nu_j - u from the grid offsets, so large centres keep their digits.
    detuning(j) = (grid.nu_min - u) + j * dnu;
    coupling(j) = opts.coupling_scale * std::sqrt((1 + nu(j) / r) * dnu / (2 * std::numbers::pi));
  }

  // Second-order shift of the excited level, with the resonant denominators
  // regularized at the decay width.
  const double shift =
      (coupling.array().square() * -detuning.array() /
       (detuning.array().square() + width * width / 4))
          .sum();
  const double bare = opts.renormalize_shift ? -shift : 0.0;

  const std::complex<double> I(0, 1);
  auto rhs = [&](const State& x, State& dxdt, double) {
    const std::complex<double> a = x(0);
    const auto b = x.tail(n);
    dxdt(0) = -I * bare * a - coupling.dot(b);
    dxdt.tail(n) = (-I * detuning.cast<std::complex<double>>()).cwiseProduct(b) +
                   coupling.cast<std::complex<double>>() * a;
  };

  OracleRun run;
  run.zeta = zeta;
  run.r = r;
  run.dnu = dnu;
  run.s_max = s_max;
  run.line_shift = shift;
  run.nu.assign(nu.data(), nu.data() + n);

  const int steps = static_cast<int>(std::ceil(s_max / opts.record_step - 1e-9));
  std::vector<double> times(steps + 1);
  for (int k = 0; k <= steps; ++k) times[k] = std::min(k * opts.record_step, s_max);

  State x = State::Zero(n + 1);
  x(0) = 1;
  auto observer = [&](const State& y, double s) {
    const double a2 = std::norm(y(0));
    run.times.push_back(s);
    run.alpha_sq.push_back(a2);
    run.norm_error = std::max(run.norm_error, std::abs(a2 + y.tail(n).squaredNorm() - 1));
  };
  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                         odeint::runge_kutta_dopri5<State, double, State, double,
                                                                    odeint::vector_space_algebra>());
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), opts.record_step / 4,
                            observer);
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("oracle ODE integration failed: ") + e.what());
  }
  if (!x.allFinite()) throw IntegrationError("oracle ODE integration produced non-finite amplitudes");

  run.beta_sq_final.resize(n);
  for (int j = 0; j < n; ++j) run.beta_sq_final[j] = std::norm(x(j + 1));

  // Least squares on log|alpha|^2 over the post-Zeno window.
  const double fit_end = std::min({kFitEnd, kRecurrenceShare * run.recurrence_time(), s_max});
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double s = run.times[k];
    if (s < kFitStart || s > fit_end + 1e-12) continue;
    const double y = std::log(run.alpha_sq[k]);
    sx += s;
    sy += y;
    sxx += s * s;
    sxy += s * y;
    ++m;
  }
  if (m >= 2) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    double ss = 0;
    for (std::size_t k = 0; k < run.times.size(); ++k) {
      const double s = run.times[k];
      if (s < kFitStart || s > fit_end + 1e-12) continue;
      const double e = std::log(run.alpha_sq[k]) - (intercept + slope * s);
      ss += e * e;
    }
    run.fitted_rate = -slope;
    run.fit_residual = std::sqrt(ss / m);
  }
  return run;
}

SpectrumResult oracle_spectrum(const OracleRun& run) {
  if (run.s_max * local_rate(run.zeta) < 5)
    throw ValidityError("oracle_spectrum: the run must last at least five lifetimes");
  SpectrumResult out;
  out.nu = run.nu;
  out.p.resize(run.beta_sq_final.size());
  for (std::size_t j = 0; j < out.p.size(); ++j) out.p[j] = run.beta_sq_final[j] / run.dnu;
  out.total_mass = trapezoid(out.nu, out.p);
  out.mass_warning = out.total_mass < kSpectrumMassFloor;
  return out;
}

SinglePoleReport validate_single_pole(double zeta, double r, const ModeGrid& grid, double s_max,
                                      double s_compare, const OracleOptions& opts) {
  SinglePoleReport rep;
  rep.run = ww_simulate(zeta, r, grid, s_max, opts);
  rep.s_compare = s_compare;
  const double limit_recurrence = kRecurrenceShare * rep.run.recurrence_time();
  rep.truncated = std::min(s_compare, s_max) > limit_recurrence;
  const double end = std::min({s_compare, s_max, limit_recurrence});
  for (std::size_t k = 0; k < rep.run.times.size(); ++k) {
    const double s = rep.run.times[k];
    if (s > end + 1e-12) break;
    const double expected = excited_amplitude_sq(zeta, s);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.run.alpha_sq[k] / expected - 1));
  }
  return rep;
}

double spectrum_peak(const SpectrumResult& s) {
  if (s.p.empty()) throw ContractViolation("spectrum_peak: empty spectrum");
  const auto it = std::max_element(s.p.begin(), s.p.end());
  return s.nu[static_cast<std::size_t>(it - s.p.begin())];
}

double spectrum_fwhm(const SpectrumResult& s) {
  if (s.p.size() < 3) throw ContractViolation("spectrum_fwhm: need at least three samples");
  const auto peak = static_cast<std::size_t>(std::max_element(s.p.begin(), s.p.end()) - s.p.begin());
  const double half = s.p[peak] / 2;
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && s.p[lo] > half) --lo;
  while (hi + 1 < s.p.size() && s.p[hi] > half) ++hi;
  if (s.p[lo] > half || s.p[hi] > half)
    throw ValidityError("spectrum_fwhm: half maximum not reached inside the grid");
  auto cross = [&](std::size_t i, std::size_t j) {
    return s.nu[i] + (half - s.p[i]) * (s.nu[j] - s.nu[i]) / (s.p[j] - s.p[i]);
  };
  return cross(hi - 1, hi) - cross(lo, lo + 1);
}

}  // namespace qtd
