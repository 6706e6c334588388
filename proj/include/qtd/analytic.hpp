#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qtd/density.hpp"
#include "qtd/errors.hpp"
#include "qtd/model.hpp"
#include "qtd/quadrature.hpp"

namespace qtd {

/// Gamma(zeta) / Gamma0 = 1 + zeta.
template <typename Scalar>
Scalar local_rate(Scalar zeta) {
  if (!(zeta > -1)) throw DomainError("local_rate: zeta must exceed -1 (Rindler horizon)");
  return 1 + zeta;
}

/// ShortTime is the Gamma0 tau << 1 limit; Exact is -dP/ds at the given s.
enum class RateMode { ShortTime, Exact };

namespace detail {
template <typename Scalar>
void require_normalized(const BasicHeightDensity<Scalar>& d) {
  if (d.kind() != DensityKind::Sampled) return;
  const Scalar mass = integrate_density([](Scalar) { return Scalar(1); }, d, QuadratureSpec{});
  if (std::abs(mass - 1) > Scalar(1e-12)) throw ContractViolation("density is not normalized");
}
}  // namespace detail

/// <zeta> under the density; exact Gaussian first moments for two-packet kinds.
template <typename Scalar>
Scalar mean_height(const BasicHeightDensity<Scalar>& d) {
  switch (d.kind()) {
    case DensityKind::Point:
      return d.point_location();
    case DensityKind::Sampled:
      detail::require_normalized(d);
      return integrate_density([](Scalar z) { return z; }, d, QuadratureSpec{});
    default: {
      Scalar m = 0;
      for (const auto& t : d.terms()) m += t.weight * t.center;
      return m;
    }
  }
}

/// Total decay rate in Gamma0 units.
template <typename Scalar>
Scalar total_rate(const BasicHeightDensity<Scalar>& d, RateMode mode = RateMode::ShortTime,
                  Scalar s = 0) {
  if (mode == RateMode::ShortTime) return 1 + mean_height(d);
  if (s < 0) throw DomainError("total_rate: s must be >= 0");
  switch (d.kind()) {
    case DensityKind::Point: {
      const Scalar g = local_rate(d.point_location());
      return g * std::exp(-g * s);
    }
    case DensityKind::Sampled:
      detail::require_normalized(d);
      return integrate_density(
          [s](Scalar z) { return local_rate(z) * std::exp(-local_rate(z) * s); }, d,
          QuadratureSpec{});
    default: {
      // Tilting a Gaussian by e^{-zeta s} shifts its mean by -width^2 s / 2.
      const Scalar w2 = d.width() * d.width();
      Scalar sum = 0;
      for (const auto& t : d.terms())
        sum += t.weight * std::exp(-(1 + t.center) * s + w2 * s * s / 4) *
               (1 + t.center - w2 * s / 2);
      return sum;
    }
  }
}

template <typename Scalar>
bool matches(const Superposition<Scalar>& s, const Mixture<Scalar>& m) {
  return s.z1 == m.z1 && s.z2 == m.z2 && s.delta == m.delta && s.theta == m.theta;
}

namespace detail {

// sin(4 theta) and cos(phi) after reduction about the nearest zero or extremum,
// so angles such as pi/4 or pi/2 typed in floating point give exact zeros.
template <typename Scalar>
Scalar sin_four(Scalar theta) {
  const Scalar quarter = std::numbers::pi_v<Scalar> / 4;
  const Scalar k = std::round(theta / quarter);
  const Scalar v = std::sin(4 * (theta - k * quarter));
  return std::fmod(k, Scalar(2)) == 0 ? v : -v;
}

template <typename Scalar>
Scalar cos_reduced(Scalar phi) {
  const Scalar half = std::numbers::pi_v<Scalar> / 2;
  const Scalar k = std::round(phi / half);
  const Scalar t = phi - k * half;
  switch (static_cast<int>(std::fmod(std::fmod(k, Scalar(4)) + 4, Scalar(4)))) {
    case 0: return std::cos(t);
    case 1: return -std::sin(t);
    case 2: return -std::cos(t);
    default: return std::sin(t);
  }
}

}  // namespace detail

/// (Gamma_sup - Gamma_cl) / Gamma0, closed form. Lengths in units of c^2/g.
template <typename Scalar>
Scalar quantum_correction(const Superposition<Scalar>& s) {
  validate(s);
  const Scalar d = s.z2 - s.z1;
  const Scalar x = d / (2 * s.delta);
  const Scalar cphi = detail::cos_reduced(s.phi);
  return d / 4 * cphi * detail::sin_four(s.theta) / (cphi * std::sin(2 * s.theta) + std::exp(x * x));
}

template <typename Scalar>
Scalar quantum_correction(const Superposition<Scalar>& s, const Mixture<Scalar>& m) {
  if (!matches(s, m))
    throw ContractViolation("quantum_correction: superposition and mixture must share z1, z2, delta, theta");
  return quantum_correction(s);
}

/// Dimensionful inputs (metres); result is dimensionless.
inline double quantum_correction(const SuperpositionSpec& s, const MixtureSpec& m,
                                 const DimensionlessScales& sc) {
  if (!matches(s, m))
    throw ContractViolation("quantum_correction: superposition and mixture must share z1, z2, delta, theta");
  return quantum_correction(to_dimensionless(s, sc));
}

/// Same quantity by quadrature of the first moments of both densities about
/// the packet midpoint (the constant parts cancel by normalization).
template <typename Scalar>
Scalar quantum_correction_quadrature(const Superposition<Scalar>& s, const QuadratureSpec& q) {
  const auto sup = BasicHeightDensity<Scalar>::superposition(s);
  const auto mix = BasicHeightDensity<Scalar>::mixture(matched_mixture(s));
  const Scalar ref = (s.z1 + s.z2) / 2;
  auto moment = [ref](Scalar z) { return z - ref; };
  return integrate_density(moment, sup, q) - integrate_density(moment, mix, q);
}

enum class RateMethod { ClosedForm, Quadrature };

struct RateResult {
  double gamma_sup = 1;
  double gamma_cl = 1;
  double gammaQ_inv = 0;
  RateMethod method = RateMethod::ClosedForm;
};

inline const char* to_string(RateMethod m) {
  return m == RateMethod::ClosedForm ? "closed-form" : "quadrature";
}

/// Rates for a superposition (dimensionless lengths) and its matched mixture.
RateResult rate_result(const Superposition<double>& s, RateMethod method,
                       const QuadratureSpec& q = {});

/// Probability of still being excited at dimensionless time s.
template <typename Scalar>
Scalar survival_probability(const BasicHeightDensity<Scalar>& d, Scalar s) {
  if (s < 0) throw DomainError("survival_probability: s must be >= 0");
  switch (d.kind()) {
    case DensityKind::Point:
      return std::exp(-local_rate(d.point_location()) * s);
    case DensityKind::Sampled:
      detail::require_normalized(d);
      return integrate_density([s](Scalar z) { return std::exp(-local_rate(z) * s); }, d,
                               QuadratureSpec{});
    default: {
      const Scalar w2 = d.width() * d.width();
      Scalar sum = 0;
      for (const auto& t : d.terms()) sum += t.weight * std::exp(-(1 + t.center) * s + w2 * s * s / 4);
      return sum;
    }
  }
}

/// |alpha(zeta, s)|^2 / |psi(zeta)|^2 in the single-pole solution.
template <typename Scalar>
Scalar excited_amplitude_sq(Scalar zeta, Scalar s) {
  if (s < 0) throw DomainError("excited_amplitude_sq: s must be >= 0");
  return std::exp(-local_rate(zeta) * s);
}

/// |beta|^2 / (g^2 |psi|^2) for a photon at detuning nu, with the atom line at
/// u = r zeta. Only the phase difference (u - nu) s enters.
template <typename Scalar>
Scalar photon_amplitude_sq(Scalar zeta, Scalar nu, Scalar s, Scalar r) {
  if (s < 0) throw DomainError("photon_amplitude_sq: s must be >= 0");
  const Scalar half_width = local_rate(zeta) / 2;
  const Scalar detuning = r * zeta - nu;
  // |e^{a + i b} - 1|^2 with a = -half_width s, b = -detuning s, written to stay
  // accurate as s -> 0.
  const Scalar a = -half_width * s;
  const Scalar b = -detuning * s;
  const Scalar sin_half = std::sin(b / 2);
  const Scalar re = std::expm1(a) * std::cos(b) - 2 * sin_half * sin_half;
  const Scalar im = std::exp(a) * std::sin(b);
  return (re * re + im * im) / (half_width * half_width + detuning * detuning);
}

/// Emission line of an atom localized at zeta, per unit nu. Integrates to 1.
template <typename Scalar>
Scalar lorentzian_line(Scalar zeta, Scalar nu, Scalar r) {
  const Scalar width = local_rate(zeta);
  const Scalar detuning = r * zeta - nu;
  return width / (2 * std::numbers::pi_v<Scalar>) / (width * width / 4 + detuning * detuning);
}

/// Closed-form mass of lorentzian_line between nu_lo and nu_hi.
template <typename Scalar>
Scalar lorentzian_mass(Scalar zeta, Scalar nu_lo, Scalar nu_hi, Scalar r) {
  const Scalar width = local_rate(zeta);
  const Scalar u = r * zeta;
  return (std::atan(2 * (nu_hi - u) / width) - std::atan(2 * (nu_lo - u) / width)) /
         std::numbers::pi_v<Scalar>;
}

struct SpectrumResult {
  std::vector<double> nu;
  std::vector<double> p;
  double total_mass = 0;  // trapezoid over the grid
  bool mass_warning = false;  // grid holds less than 0.9 of the line
};

/// Minimum share of the line a grid must hold before SpectrumResult warns.
inline constexpr double kSpectrumMassFloor = 0.9;

/// P(nu) = int d zeta density(zeta) lorentzian_line(zeta, nu, r), in Gamma0 units.
SpectrumResult spectrum(const HeightDensity& density, double r, const std::vector<double>& nu_grid,
                        const QuadratureSpec& q = QuadratureSpec::adaptive(1e-10));

/// Trapezoid mass of sampled values on a grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

/// Inputs for the coherence contribution to a clock's average time.
struct CoherenceParams {
  double sigma_z = 1;   // m
  double sigma_v = 0;   // m/s
  double p_bar = 0;     // kg m/s
  double alpha_w = 0.5;
  double phi = 0;       // rad
  double t = 0;         // s
  double m = constants::kAtomicMassUnit;  // kg

  void validate() const;
};

/// Bracket terms of T_coh and their weighted sum.
struct CoherenceTerms {
  double term1 = 0;         // ((z2-z1)/2 sigma_z)^2 sigma_v^2 / c^2
  double term2 = 0;         // -g (z2-z1) (1 - 2 alpha) / c^2
  double term3 = 0;         // -term3_factor tan(phi); infinite at phi = pi/2
  double term3_factor = 0;  // (2/hbar)(sigma_v^2/c^2)(z2-z1)(p_bar - m g t)
  double normalization = 1; // N
  double prefactor = 0;     // (N-1)/(2N)
  double t_coh = 0;         // s
};

struct ClockConstants {
  double g = constants::kStandardGravity;
  double c = constants::kSpeedOfLight;
  double hbar = constants::kHbar;
};

CoherenceTerms coherence_time_full(const CoherenceParams& kp, double z1, double z2,
                                    const ClockConstants& k = {});

/// gamma_Q^{-1} after dropping the kinetic and momentum terms.
double coherence_time_reduced(const CoherenceParams& kp, double z1, double z2,
                               const ClockConstants& k = {});

}  // namespace qtd
