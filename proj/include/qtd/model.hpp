#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "qtd/errors.hpp"

namespace qtd {

namespace constants {
inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kStandardGravity = 9.80665;        // m/s^2
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;     // kg
}  // namespace constants

/// Dimensionful inputs. Gamma0 is always populated once constructed through
/// one of the factories; `dipole` is kept when it was the source.
struct PhysicalParams {
  double g = constants::kStandardGravity;
  double c = constants::kSpeedOfLight;
  double hbar = constants::kHbar;
  double eps0 = constants::kVacuumPermittivity;
  double omega = 0.0;   // rad/s
  double gamma0 = 0.0;  // 1/s
  std::optional<double> dipole;  // C m
  double mass = constants::kAtomicMassUnit;  // kg

  static PhysicalParams with_gamma0(double omega, double gamma0);
  static PhysicalParams with_dipole(double omega, double dipole);

  /// Omega / Gamma0.
  double frequency_ratio() const { return omega / gamma0; }

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Gamma0 = Omega d^2 / (2 hbar c eps0).
double derive_gamma0(double omega, double dipole, double hbar = constants::kHbar,
                     double c = constants::kSpeedOfLight,
                     double eps0 = constants::kVacuumPermittivity);

/// g = 9.80665, c = 299792458, Omega/Gamma0 = 1.5e17, Omega = 2.5e15 rad/s.
PhysicalParams earth_aluminium_preset();

/// Conversions between SI and the internal frame: heights in units of c^2/g,
/// times in 1/Gamma0, detunings from Omega in units of Gamma0.
struct DimensionlessScales {
  double r = 1.0;           // Omega / Gamma0
  double g_over_c2 = 0.0;   // 1/m
  double gamma0 = 1.0;      // 1/s
  double omega = 1.0;       // rad/s

  static DimensionlessScales from(const PhysicalParams& p);

  double zeta(double z_m) const { return g_over_c2 * z_m; }
  double height_m(double zeta) const { return zeta / g_over_c2; }
  double s(double tau_s) const { return gamma0 * tau_s; }
  double nu(double omega_k) const { return (omega_k - omega) / gamma0; }
  double omega_k(double nu) const { return omega + nu * gamma0; }
};

/// Two-Gaussian coherent superposition. The length unit is whatever the caller
/// uses consistently (metres for specs, c^2/g inside the library).
template <typename Scalar>
struct Superposition {
  Scalar z1{}, z2{}, delta{1}, theta{}, phi{};
};

/// Incoherent mixture of the same two packets.
template <typename Scalar>
struct Mixture {
  Scalar z1{}, z2{}, delta{1}, theta{};
};

using SuperpositionSpec = Superposition<double>;
using MixtureSpec = Mixture<double>;
using StateSpec = std::variant<SuperpositionSpec, MixtureSpec>;

template <typename Scalar>
void validate(const Superposition<Scalar>& s) {
  using std::isfinite;
  if (!isfinite(s.z1)) throw ConfigError("z1", "must be finite");
  if (!isfinite(s.z2)) throw ConfigError("z2", "must be finite");
  if (!(s.delta > 0) || !isfinite(s.delta)) throw ConfigError("delta", "must be > 0");
  if (!(s.theta >= 0) || !(s.theta <= std::numbers::pi_v<Scalar> / 2))
    throw ConfigError("theta", "must lie in [0, pi/2]");
  if (!(s.phi >= 0) || !(s.phi < 2 * std::numbers::pi_v<Scalar>))
    throw ConfigError("phi", "must lie in [0, 2pi)");
  const Scalar overlap = std::exp(-(s.z2 - s.z1) * (s.z2 - s.z1) / (4 * s.delta * s.delta));
  if (!(1 + std::cos(s.phi) * std::sin(2 * s.theta) * overlap > 0))
    throw ConfigError("phi", "the two branches cancel; the state has zero norm");
}

template <typename Scalar>
void validate(const Mixture<Scalar>& m) {
  validate(Superposition<Scalar>{m.z1, m.z2, m.delta, m.theta, Scalar(0)});
}

template <typename Scalar>
Mixture<Scalar> matched_mixture(const Superposition<Scalar>& s) {
  return {s.z1, s.z2, s.delta, s.theta};
}

/// Gaussian overlap e^{-(z1-z2)^2 / 4 Delta^2}.
template <typename Scalar>
Scalar packet_overlap(Scalar z1, Scalar z2, Scalar delta) {
  const Scalar d = (z2 - z1) / (2 * delta);
  return std::exp(-d * d);
}

/// cos(phi) sin(2 theta) times the overlap; the interference weight.
template <typename Scalar>
Scalar interference_weight(const Superposition<Scalar>& s) {
  return std::cos(s.phi) * std::sin(2 * s.theta) * packet_overlap(s.z1, s.z2, s.delta);
}

template <typename Scalar>
Scalar norm_constant(const Superposition<Scalar>& s) {
  using std::sqrt;
  const Scalar sqrt_pi = sqrt(std::numbers::pi_v<Scalar>);
  return 1 / sqrt(sqrt_pi * s.delta * (1 + interference_weight(s)));
}

/// |psi_sup(z)|^2, evaluated from the wave function itself.
template <typename Scalar>
Scalar density_sup(const Superposition<Scalar>& s, Scalar z) {
  const Scalar n = norm_constant(s);
  const Scalar a = (z - s.z1) / s.delta;
  const Scalar b = (z - s.z2) / s.delta;
  const Scalar ct = std::cos(s.theta);
  const Scalar st = std::sin(s.theta);
  const Scalar g1 = std::exp(-a * a);
  const Scalar g2 = std::exp(-b * b);
  const Scalar cross = std::exp(-(a * a + b * b) / 2);
  return n * n * (ct * ct * g1 + st * st * g2 + 2 * std::cos(s.phi) * st * ct * cross);
}

template <typename Scalar>
Scalar density_mix(const Mixture<Scalar>& m, Scalar z) {
  const Scalar a = (z - m.z1) / m.delta;
  const Scalar b = (z - m.z2) / m.delta;
  const Scalar ct = std::cos(m.theta);
  const Scalar st = std::sin(m.theta);
  return (ct * ct * std::exp(-a * a) + st * st * std::exp(-b * b)) /
         (std::sqrt(std::numbers::pi_v<Scalar>) * m.delta);
}

template <typename Scalar>
Superposition<Scalar> to_dimensionless(const Superposition<Scalar>& s,
                                       const DimensionlessScales& sc) {
  return {Scalar(sc.g_over_c2) * s.z1, Scalar(sc.g_over_c2) * s.z2,
          Scalar(sc.g_over_c2) * s.delta, s.theta, s.phi};
}

template <typename Scalar>
Mixture<Scalar> to_dimensionless(const Mixture<Scalar>& m, const DimensionlessScales& sc) {
  return {Scalar(sc.g_over_c2) * m.z1, Scalar(sc.g_over_c2) * m.z2,
          Scalar(sc.g_over_c2) * m.delta, m.theta};
}

}  // namespace qtd
