#include "qtd/model.hpp"

#include <cmath>

namespace qtd {

PhysicalParams PhysicalParams::with_gamma0(double omega, double gamma0) {
  PhysicalParams p;
  p.omega = omega;
  p.gamma0 = gamma0;
  p.validate();
  return p;
}

PhysicalParams PhysicalParams::with_dipole(double omega, double dipole) {
  PhysicalParams p;
  p.omega = omega;
  p.dipole = dipole;
  p.gamma0 = derive_gamma0(omega, dipole, p.hbar, p.c, p.eps0);
  p.validate();
  return p;
}

void PhysicalParams::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0) || !std::isfinite(v)) throw ConfigError(field, "must be finite and > 0");
  };
  positive(g, "g");
  positive(c, "c");
  positive(hbar, "hbar");
  positive(eps0, "eps0");
  positive(omega, "omega_rad_s");
  if (dipole) positive(*dipole, "dipole_Cm");
  positive(gamma0, dipole ? "dipole_Cm" : "gamma0_s");
  positive(mass, "mass_kg");
  if (!(omega / gamma0 >= 1)) throw ConfigError("gamma0_s", "Omega/Gamma0 must be >= 1");
}

double derive_gamma0(double omega, double dipole, double hbar, double c, double eps0) {
  return omega * dipole * dipole / (2 * hbar * c * eps0);
}

PhysicalParams earth_aluminium_preset() {
  constexpr double omega = 2.5e15;
  constexpr double ratio = 1.5e17;
  return PhysicalParams::with_gamma0(omega, omega / ratio);
}

DimensionlessScales DimensionlessScales::from(const PhysicalParams& p) {
  p.validate();
  DimensionlessScales s;
  s.r = p.frequency_ratio();
  s.g_over_c2 = p.g / (p.c * p.c);
  s.gamma0 = p.gamma0;
  s.omega = p.omega;
  return s;
}

}  // namespace qtd
