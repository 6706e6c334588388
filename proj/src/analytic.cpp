#include "qtd/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace qtd {

RateResult rate_result(const Superposition<double>& s, RateMethod method, const QuadratureSpec& q) {
  const auto sup = HeightDensity::superposition(s);
  const auto mix = HeightDensity::mixture(matched_mixture(s));
  RateResult out;
  out.method = method;
  if (method == RateMethod::ClosedForm) {
    out.gamma_sup = total_rate(sup);
    out.gamma_cl = total_rate(mix);
    out.gammaQ_inv = quantum_correction(s);
  } else {
    auto rate = [](double z) { return local_rate(z); };
    out.gamma_sup = integrate_density(rate, sup, q);
    out.gamma_cl = integrate_density(rate, mix, q);
    out.gammaQ_inv = quantum_correction_quadrature(s, q);
  }
  return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractViolation("trapezoid: size mismatch");
  double sum = 0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) / 2;
  return sum;
}

namespace {

// Cuts at geometric distances from a Lorentzian centre so the adaptive rule
// sees its core at any width, from 1e-16 up to the whole interval.
std::vector<double> lorentzian_cuts(double centre, double half_width, double lo, double hi) {
  std::vector<double> cuts{centre};
  for (double step = half_width; step < hi - lo; step *= 4) {
    cuts.push_back(centre - step);
    cuts.push_back(centre + step);
  }
  return cuts;
}

double gaussian_term_line(const GaussianTerm<double>& t, double width, double r, double nu,
                          const QuadratureSpec& q) {
  const double inv_sqrt_pi = 1 / std::sqrt(std::numbers::pi);
  // zeta = centre + width x; the detuning r zeta - nu is assembled from r-scaled
  // pieces so no large absolute frequency is ever formed.
  const double u0 = r * t.center - nu;
  const double ru = r * width;
  auto lorentz = [&](double x) {
    const double lw = local_rate(t.center + width * x);
    const double det = u0 + ru * x;
    return lw / (2 * std::numbers::pi) / (lw * lw / 4 + det * det);
  };
  if (q.method == QuadratureMethod::GaussHermite) {
    const auto& rule = gauss_hermite<double>(q.order);
    double sum = 0;
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) sum += rule.weights(k) * lorentz(rule.nodes(k));
    return inv_sqrt_pi * sum;
  }
  auto line = [&](double x) { return inv_sqrt_pi * std::exp(-x * x) * lorentz(x); };
  const double lo = -kSupportWidths, hi = kSupportWidths;
  const double centre = -u0 / ru;
  const double half_width = local_rate(t.center) / (2 * std::abs(ru));
  return adaptive_integrate_split(line, lo, hi, lorentzian_cuts(centre, half_width, lo, hi), q);
}

}  // namespace

SpectrumResult spectrum(const HeightDensity& density, double r, const std::vector<double>& nu_grid,
                        const QuadratureSpec& q) {
  q.validate();
  if (!(r > 0)) throw ConfigError("r", "must be > 0");
  if (nu_grid.size() < 2) throw ContractViolation("spectrum: grid needs at least two points");
  for (std::size_t i = 1; i < nu_grid.size(); ++i)
    if (!(nu_grid[i] > nu_grid[i - 1])) throw ContractViolation("spectrum: grid must increase");
  detail::require_normalized(density);

  SpectrumResult out;
  out.nu = nu_grid;
  out.p.reserve(nu_grid.size());
  for (double nu : nu_grid) {
    double p = 0;
    switch (density.kind()) {
      case DensityKind::Point:
        p = lorentzian_line(density.point_location(), nu, r);
        break;
      case DensityKind::Sampled: {
        const auto [lo, hi] = density.support();
        std::vector<double> cuts(density.grid().begin(), density.grid().end());
        const double centre = nu / r;
        for (double c : lorentzian_cuts(centre, local_rate(std::max(centre, lo)) / (2 * r), lo, hi))
          cuts.push_back(c);
        auto g = [&](double z) { return density(z) * lorentzian_line(z, nu, r); };
        p = adaptive_integrate_split(g, lo, hi, std::move(cuts), q);
        break;
      }
      default:
        for (const auto& t : density.terms())
          if (t.weight != 0) p += t.weight * gaussian_term_line(t, density.width(), r, nu, q);
        break;
    }
    // The interference term can leave a rounding-level negative tail.
    out.p.push_back(std::max(p, 0.0));
  }
  out.total_mass = trapezoid(out.nu, out.p);
  out.mass_warning = out.total_mass < kSpectrumMassFloor;
  return out;
}

void CoherenceParams::validate() const {
  if (!(sigma_z > 0)) throw ConfigError("sigma_z", "must be > 0");
  if (!(sigma_v > 0)) throw ConfigError("sigma_v", "must be > 0");
  if (!(alpha_w >= 0 && alpha_w <= 1)) throw ConfigError("alpha_w", "must lie in [0, 1]");
  if (!std::isfinite(phi)) throw ConfigError("phi", "must be finite");
  if (!std::isfinite(t)) throw ConfigError("t", "must be finite");
  if (!std::isfinite(p_bar)) throw ConfigError("p_bar", "must be finite");
  if (!(m > 0)) throw ConfigError("m", "must be > 0");
}

CoherenceTerms coherence_time_full(const CoherenceParams& kp, double z1, double z2,
                                    const ClockConstants& k) {
  kp.validate();
  const double d = z2 - z1;
  const double x = d / (2 * kp.sigma_z);
  const double overlap = std::exp(-x * x);
  const double root = std::sqrt(kp.alpha_w * (1 - kp.alpha_w));
  const double v2 = kp.sigma_v * kp.sigma_v / (k.c * k.c);

  CoherenceTerms out;
  out.normalization = 1 + 2 * std::cos(kp.phi) * root * overlap;
  out.prefactor = std::cos(kp.phi) * root * overlap / out.normalization;
  out.term1 = x * x * v2;
  out.term2 = -k.g * d * (1 - 2 * kp.alpha_w) / (k.c * k.c);
  out.term3_factor = 2 / k.hbar * v2 * d * (kp.p_bar - kp.m * k.g * kp.t);
  out.term3 = -out.term3_factor * std::tan(kp.phi);
  // (N-1)/(2N) tan(phi) = sin(phi) root overlap / N stays finite at phi = pi/2.
  const double prefactor_tan = std::sin(kp.phi) * root * overlap / out.normalization;
  out.t_coh = (out.prefactor * (out.term1 + out.term2) - prefactor_tan * out.term3_factor) * kp.t;
  return out;
}

double coherence_time_reduced(const CoherenceParams& kp, double z1, double z2,
                               const ClockConstants& k) {
  kp.validate();
  const double d = z2 - z1;
  const double x = d / (2 * kp.sigma_z);
  const double root = std::cos(kp.phi) * std::sqrt(kp.alpha_w * (1 - kp.alpha_w));
  return k.g * root * (2 * kp.alpha_w - 1) * d / (k.c * k.c * (2 * root + std::exp(x * x)));
}

}  // namespace qtd
