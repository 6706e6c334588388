#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "qtd/analytic.hpp"

namespace qtd {

/// Evenly spaced samples on [lo, hi]; a single point sits at lo.
struct Axis {
  double lo = 0;
  double hi = 0;
  int n = 1;

  double at(int k) const { return n == 1 ? lo : lo + (hi - lo) * k / (n - 1); }
  std::vector<double> values() const;
  void validate(const char* field) const;
};

enum class SweepPanel { PhiSeparation, ThetaSeparation };

/// One rate-difference surface: gammaQ_inv over separation and one angle, the other
/// angle held fixed. Lengths in units of c^2/g.
struct SweepSpec {
  SweepPanel panel = SweepPanel::PhiSeparation;
  double delta_zeta = 0.01;
  double fixed_angle = std::numbers::pi / 8;  // theta or phi, whichever is not swept
  Axis separation{0, 0.05, 201};
  Axis angle{0, 2 * std::numbers::pi, 201};
  int quadrature_order = 64;

  void validate() const;

  static SweepSpec panel_a();  // theta = pi/8 over (dz, phi)
  static SweepSpec panel_b();  // phi = 0 over (dz, theta)
  static SweepSpec panel_c();  // phi = pi over (dz, theta)
};

struct SweepRow {
  double theta, phi, dz, gammaQ_inv;
};

/// Rows in (separation-major) order. Values come from Gauss-Hermite moments in
/// extended precision, not from the closed form. phi = 2 pi is read as 0.
std::vector<SweepRow> figure1_sweep(const SweepSpec& spec);

/// One line-shape panel: superposition (theta = pi/4, phi = 0) against the matching mixture.
struct LineCase {
  double zeta1 = -1e-17;
  double zeta2 = 1e-17;
  double delta_zeta = 5e-18;
  double r = 1.5e17;
  double theta = std::numbers::pi / 4;
  double phi = 0;
  Axis nu{-5, 5, 4001};

  void validate() const;

  /// Panels 'a'..'d'.
  static LineCase figure2(char panel);
};

struct LinePair {
  SpectrumResult sup;
  SpectrumResult cl;
};

LinePair figure2_lines(const LineCase& c, const QuadratureSpec& q = QuadratureSpec::adaptive(1e-10));

/// Interior local maxima of a sampled spectrum, refined by a parabola through
/// the three highest samples.
std::vector<double> local_maxima(const SpectrumResult& s);

/// max_nu |a - b| on a shared grid.
double max_difference(const SpectrumResult& a, const SpectrumResult& b);

/// Coarse grid plus coordinate-wise golden-section refinement of |gammaQ_inv|.
/// Separations are in units of the packet width.
struct ScanSpec {
  double delta_zeta = 0.01;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> separation;  // (z2 - z1) / Delta
  int refine_sweeps = 40;

  void validate() const;
  static ScanSpec defaults(double delta_zeta);
};

struct ScanReport {
  double max_gammaQ = 0;  // signed value at the optimum
  double theta_star = 0;
  double phi_star = 0;
  double dz_star = 0;  // in units of c^2/g
  double ratio_to_quarter_delta = 0;
};

ScanReport optimal_state_scan(const ScanSpec& spec);

/// Bracket-term magnitudes at the comparison point: z2 - z1 = sigma_z =
/// 1e-18 c^2/g, sigma_v = hbar / (m sigma_z), p_bar = 0, t up to t_max.
struct TermReport {
  double separation_m = 0;
  double sigma_z_m = 0;
  double sigma_v = 0;
  double v2_over_c2 = 0;
  double term1 = 0;
  double term2 = 0;
  double term3_bound = 0;  // max |factor multiplying tan(phi)| over [0, t_max]
};

TermReport term_magnitude_report(double mass = constants::kAtomicMassUnit, double t_max = 1e-8,
                                 double alpha = 0.8535533905932737, const ClockConstants& k = {});

}  // namespace qtd
