#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qtd/analytic.hpp"
#include "qtd/errors.hpp"

namespace qtd {

/// Uniform detuning grid for the discretized field, in Gamma0 units.
struct ModeGrid {
  double nu_min = -100;
  double nu_max = 100;
  int n_modes = 8001;

  double spacing() const { return (nu_max - nu_min) / (n_modes - 1); }
  double nu(int j) const { return nu_min + j * spacing(); }

  static ModeGrid centered(double centre, double half_width, int n_modes);

  /// Window of 0.1 r (1 + zeta) linewidths around u = r zeta (at least 25
  /// linewidths), spacing 0.025 (1 + zeta) capped at 0.05. At r = 1e3, zeta = 0
  /// this is +/-100 with 8001 modes.
  static ModeGrid standard(double zeta, double r);

  /// Throws ConfigError: the window must hold u with a 25-linewidth margin,
  /// spacing <= 0.05 and every mode frequency positive.
  void validate(double zeta, double r) const;
};

struct OracleOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double record_step = 0.025;
  double coupling_scale = 1;       // 0 decouples the atom
  bool renormalize_shift = true;   // simulate the observed, not the bare, line
};

struct OracleRun {
  double zeta = 0;
  double r = 1;
  double dnu = 0;
  double s_max = 0;
  double line_shift = 0;  // second-order shift cancelled by the bare detuning
  std::vector<double> nu;
  std::vector<double> times;
  std::vector<double> alpha_sq;
  std::vector<double> beta_sq_final;
  double norm_error = 0;  // max |alpha^2 + sum beta^2 - 1| over the records
  double fitted_rate = 0;
  double fit_residual = 0;  // rms of the log-linear fit

  double recurrence_time() const;
};

/// Integrates the one-excitation Wigner-Weisskopf system for an atom fixed at
/// zeta, in the frame rotating at its shifted line centre u = r zeta.
OracleRun ww_simulate(double zeta, double r, const ModeGrid& grid, double s_max,
                      const OracleOptions& opts = {});

/// |beta_j(s_max)|^2 / dnu. Throws ValidityError unless the run lasted five lifetimes.
SpectrumResult oracle_spectrum(const OracleRun& run);

struct SinglePoleReport {
  OracleRun run;
  double s_compare = 5;
  double max_deviation = 0;  // max |alpha^2 / e^{-(1+zeta)s} - 1|
  bool truncated = false;    // comparison cut at 0.8 of the recurrence time
};

SinglePoleReport validate_single_pole(double zeta, double r, const ModeGrid& grid, double s_max,
                                      double s_compare = 5, const OracleOptions& opts = {});

/// Location of the largest sample.
double spectrum_peak(const SpectrumResult& s);

/// Full width at half maximum of the main peak, interpolated linearly.
double spectrum_fwhm(const SpectrumResult& s);

}  // namespace qtd
