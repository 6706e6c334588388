#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qtd/analytic.hpp"
#include "qtd/experiments.hpp"

using namespace qtd;
using std::numbers::pi;

namespace {

// 40-digit brute-force quadrature of int (1+zeta)(|psi_sup|^2 - P_cl) at
// theta = pi/8, phi = 0, zeta in {0, 0.02}, Delta = 0.01.
constexpr double kSpotCorrection = 1.459688394455578e-3;
// Same quadrature of int (1+zeta)|psi_sup|^2.
constexpr double kSpotRateSup = 1.0043886205825901;
// int P_cl e^{-(1+zeta)} for theta = pi/4, zeta = -/+0.4, Delta = 0.005.
constexpr double kSurvivalExample = 0.39770678567745924;

const Superposition<double> kSpot{0, 0.02, 0.01, pi / 8, 0};

Superposition<double> random_sup(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const double delta = 0.002 + 0.018 * u(rng);
  const double z1 = -0.05 + 0.1 * u(rng);
  const double z2 = z1 + (2 * u(rng) - 1) * 6 * delta;
  return {z1, z2, delta, pi / 2 * u(rng), 2 * pi * u(rng) * (1 - 1e-12)};
}

}  // namespace

TEST_CASE("local_rate") {
  CHECK(local_rate(0.0) == 1);
  CHECK(local_rate(0.01) == doctest::Approx(1.01).epsilon(1e-15));
  CHECK(local_rate(1e-18) - 1 == doctest::Approx(1e-18).epsilon(0.2));
  CHECK_THROWS_AS(local_rate(-1.0), DomainError);
  CHECK_THROWS_AS(local_rate(-2.0), DomainError);
}

TEST_CASE("total_rate") {
  CHECK(total_rate(HeightDensity::mixture({-0.03, 0.03, 0.01, pi / 4})) == doctest::Approx(1).epsilon(1e-15));
  CHECK(total_rate(HeightDensity::mixture({0, 0.02, 0.01, pi / 2})) == doctest::Approx(1.02).epsilon(1e-15));
  const auto sup = HeightDensity::superposition(kSpot);
  const double closed = total_rate(sup);
  CHECK(closed == doctest::Approx(kSpotRateSup).epsilon(1e-14));
  auto rate = [](double z) { return local_rate(z); };
  CHECK(integrate_density(rate, sup, QuadratureSpec::gauss_hermite(64)) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(integrate_density(rate, sup, QuadratureSpec::adaptive(1e-13)) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(total_rate(HeightDensity::point(0.25)) == 1.25);
}

TEST_CASE("exact time-dependent rate") {
  const auto d = HeightDensity::superposition(kSpot);
  CHECK(total_rate(d, RateMode::Exact, 0.0) == doctest::Approx(total_rate(d)).epsilon(1e-14));
  for (double s : {0.3, 1.0, 4.0}) {
    const double h = 1e-5;
    const double fd = -(survival_probability(d, s + h) - survival_probability(d, s - h)) / (2 * h);
    CHECK(total_rate(d, RateMode::Exact, s) == doctest::Approx(fd).epsilon(1e-8));
    auto f = [s](double z) { return local_rate(z) * std::exp(-local_rate(z) * s); };
    CHECK(total_rate(d, RateMode::Exact, s) ==
          doctest::Approx(integrate_density(f, d, QuadratureSpec::adaptive(1e-13))).epsilon(1e-11));
  }
  CHECK_THROWS_AS(total_rate(d, RateMode::Exact, -1.0), DomainError);
}

TEST_CASE("quantum_correction examples") {
  CHECK(quantum_correction(Superposition<double>{0, 0.02, 0.01, pi / 4, 0}) == doctest::Approx(0).epsilon(1e-15));
  CHECK(std::abs(quantum_correction(Superposition<double>{0, 0.02, 0.01, pi / 8, pi / 2})) < 1e-15);
  CHECK(quantum_correction(kSpot) == doctest::Approx(kSpotCorrection).epsilon(1e-13));
  CHECK(quantum_correction(kSpot) == doctest::Approx(1.4597e-3).epsilon(1e-4));
  CHECK(quantum_correction_quadrature(kSpot, QuadratureSpec::gauss_hermite()) ==
        doctest::Approx(kSpotCorrection).epsilon(1e-12));
  CHECK(quantum_correction_quadrature(kSpot, QuadratureSpec::adaptive(1e-13)) ==
        doctest::Approx(kSpotCorrection).epsilon(1e-10));
  CHECK(quantum_correction(kSpot, matched_mixture(kSpot)) == quantum_correction(kSpot));
  CHECK_THROWS_AS(quantum_correction(kSpot, Mixture<double>{0, 0.03, 0.01, pi / 8}), ContractViolation);
  CHECK_THROWS_AS(quantum_correction(kSpot, Mixture<double>{0, 0.02, 0.01, pi / 7}), ContractViolation);

  const auto sc = DimensionlessScales::from(earth_aluminium_preset());
  const SuperpositionSpec si{0, 0.02 / sc.g_over_c2, 0.01 / sc.g_over_c2, pi / 8, 0};
  CHECK(quantum_correction(si, matched_mixture(si), sc) == doctest::Approx(kSpotCorrection).epsilon(1e-12));
}

TEST_CASE("rate_result") {
  const auto closed = rate_result(kSpot, RateMethod::ClosedForm);
  const auto quad = rate_result(kSpot, RateMethod::Quadrature, QuadratureSpec::gauss_hermite(64));
  CHECK(closed.gammaQ_inv == doctest::Approx(closed.gamma_sup - closed.gamma_cl).epsilon(1e-10));
  CHECK(quad.gamma_sup == doctest::Approx(closed.gamma_sup).epsilon(1e-13));
  CHECK(quad.gamma_cl == doctest::Approx(closed.gamma_cl).epsilon(1e-13));
  CHECK(quad.gammaQ_inv == doctest::Approx(closed.gammaQ_inv).epsilon(1e-12));
  CHECK(std::string(to_string(quad.method)) == "quadrature");
  for (double theta : {0.0, pi / 4, pi / 2}) {
    const auto r = rate_result({0.01, 0.03, 0.01, theta, 0.3}, RateMethod::ClosedForm);
    CHECK(std::abs(r.gammaQ_inv) < 1e-15);
  }
}

TEST_CASE("quantum_correction properties") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_sup(rng);
    const double v = quantum_correction(s);
    const Superposition<double> mirrored{s.z1, s.z2, s.delta, pi / 2 - s.theta, s.phi};
    CHECK(quantum_correction(mirrored) == doctest::Approx(-v).epsilon(1e-10).scale(1e-16));
    const Superposition<double> swapped{s.z2, s.z1, s.delta, pi / 2 - s.theta, s.phi};
    CHECK(quantum_correction(swapped) == doctest::Approx(v).epsilon(1e-10).scale(1e-16));
    const double d = s.z2 - s.z1;
    const double overlap = std::exp(-d * d / (4 * s.delta * s.delta));
    if (overlap <= 0.5) CHECK(std::abs(v) <= std::abs(d) / 4 * overlap * 2 * (1 + 1e-12));
  }
  double previous = 1;
  for (double ratio : {2.0, 4.0, 8.0, 16.0}) {
    const double v = std::abs(quantum_correction(Superposition<double>{0, ratio * 0.01, 0.01, pi / 8, 0}));
    CHECK(v < previous);
    previous = v;
  }
  CHECK(previous < 1e-25);
}

TEST_CASE("survival_probability") {
  const auto sup = HeightDensity::superposition(kSpot);
  CHECK(survival_probability(sup, 0.0) == doctest::Approx(1).epsilon(1e-15));
  for (double s : {0.5, 1.0, 3.0}) CHECK(survival_probability(HeightDensity::point(0.0), s) == std::exp(-s));
  const auto mix = HeightDensity::mixture({-0.4, 0.4, 0.005, pi / 4});
  const double expected = std::exp(-1.0) * std::cosh(0.4) * std::exp(0.005 * 0.005 / 4);
  CHECK(survival_probability(mix, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(survival_probability(mix, 1.0) == doctest::Approx(kSurvivalExample).epsilon(1e-14));
  auto f = [](double z) { return std::exp(-local_rate(z)); };
  CHECK(integrate_density(f, mix, QuadratureSpec::adaptive(1e-13)) == doctest::Approx(kSurvivalExample).epsilon(1e-12));
  double last = 1;
  for (int k = 1; k <= 100; ++k) {
    const double p = survival_probability(sup, 0.1 * k);
    CHECK(p <= last);
    CHECK(p > 0);
    last = p;
  }
  const double h = 1e-6;
  CHECK((survival_probability(sup, h) - 1) / h == doctest::Approx(-total_rate(sup)).epsilon(1e-5));
  CHECK_THROWS_AS(survival_probability(sup, -0.1), DomainError);
}

TEST_CASE("amplitudes") {
  CHECK(excited_amplitude_sq(0.0, 0.0) == 1);
  CHECK(excited_amplitude_sq(0.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(excited_amplitude_sq(1.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(excited_amplitude_sq(-1.5, 1.0), DomainError);
  CHECK_THROWS_AS(excited_amplitude_sq(0.0, -1.0), DomainError);

  CHECK(photon_amplitude_sq(0.0, 0.3, 0.0, 1e3) == 0);
  CHECK(photon_amplitude_sq(0.0, 0.0, 50.0, 1e3) == doctest::Approx(4 * std::pow(1 - std::exp(-25.0), 2)).epsilon(1e-14));
  CHECK(photon_amplitude_sq(0.3, 0.3 * 1e3 + 0.65, 200.0, 1e3) ==
        doctest::Approx(photon_amplitude_sq(0.3, 0.3 * 1e3, 200.0, 1e3) / 2).epsilon(1e-12));
  // Physical frequency ratio: the line sits at u = r zeta without forming absolute frequencies.
  CHECK(photon_amplitude_sq(1e-18, 0.15, 60.0, 1.5e17) == doctest::Approx(4).epsilon(1e-12));
  for (double zeta : {0.0, 0.25, 0.5}) {
    const double u = 1e3 * zeta;
    const double stationary = 1 / (local_rate(zeta) * local_rate(zeta) / 4);
    CHECK(photon_amplitude_sq(zeta, u, 50 / local_rate(zeta), 1e3) == doctest::Approx(stationary).epsilon(1e-3));
  }
  // Small s: the bracket keeps its leading s^2 behaviour.
  const double s = 1e-9;
  CHECK(photon_amplitude_sq(0.0, 0.0, s, 1.0) == doctest::Approx(4 * s * s / 4 / 0.25 * 0.25).epsilon(1e-6));
}

TEST_CASE("lorentzian line") {
  CHECK(lorentzian_line(0.0, 0.0, 1e3) == doctest::Approx(2 / pi).epsilon(1e-15));
  CHECK(lorentzian_line(0.0, 0.5, 1e3) == doctest::Approx(1 / pi).epsilon(1e-15));
  CHECK(lorentzian_mass(0.2, -1e300, 1e300, 10.0) == doctest::Approx(1).epsilon(1e-15));
  const double direct = adaptive_integrate([](double nu) { return lorentzian_line(0.2, nu, 10.0); }, -8.0, 12.0,
                                           QuadratureSpec::adaptive(1e-13));
  CHECK(direct == doctest::Approx(lorentzian_mass(0.2, -8.0, 12.0, 10.0)).epsilon(1e-12));
}

TEST_CASE("spectrum examples") {
  std::vector<double> grid;
  for (int k = 0; k <= 2000; ++k) grid.push_back(-10 + 0.01 * k);

  const auto flat = spectrum(HeightDensity::point(0.0), 1e3, grid);
  CHECK(flat.nu[1000] == doctest::Approx(0).scale(1));
  CHECK(flat.p[1000] == doctest::Approx(2 / pi).epsilon(1e-14));
  CHECK(flat.p[1050] == doctest::Approx(1 / pi).epsilon(1e-12));
  CHECK(flat.p[950] == doctest::Approx(1 / pi).epsilon(1e-12));

  const auto shifted = spectrum(HeightDensity::point(0.0002), 1e4, grid);
  CHECK(shifted.p[1200] == doctest::Approx(2 / (pi * 1.0002)).epsilon(1e-12));
  const double hw = 1.0002 / 2;
  CHECK(lorentzian_line(0.0002, 2 + hw, 1e4) == doctest::Approx(shifted.p[1200] / 2).epsilon(1e-12));

  const auto pair = figure2_lines(LineCase::figure2('d'));
  for (const auto* s : {&pair.sup, &pair.cl}) {
    const auto maxima = local_maxima(*s);
    REQUIRE(maxima.size() == 2);
    CHECK(maxima[0] == doctest::Approx(-1.5).epsilon(0.03));
    CHECK(maxima[1] == doctest::Approx(1.5).epsilon(0.03));
  }
}

TEST_CASE("spectrum normalization and warnings") {
  const auto mix = HeightDensity::mixture({-0.01, 0.01, 0.005, pi / 4});
  const double r = 1e3;
  double previous_defect = 1;
  for (double half : {50.0, 100.0, 200.0}) {
    std::vector<double> grid;
    const double lo = -(10 + half), hi = 10 + half;
    for (int k = 0; k <= 40000; ++k) grid.push_back(lo + (hi - lo) * k / 40000);
    const auto s = spectrum(mix, r, grid);
    CHECK(s.total_mass >= 0.9);
    CHECK(s.total_mass <= 1.0001);
    CHECK_FALSE(s.mass_warning);
    const double defect = 1 - s.total_mass;
    CHECK(defect < previous_defect);
    previous_defect = defect;
  }
  const auto narrow = spectrum(HeightDensity::point(0.0), 1e3, {-0.5, 0.0, 0.5});
  CHECK(narrow.mass_warning);
  CHECK_THROWS_AS(spectrum(mix, r, {0.0, 0.0, 1.0}), ContractViolation);
}

TEST_CASE("spectrum paths agree") {
  const auto sup = HeightDensity::superposition({-0.002, 0.002, 0.002, pi / 3, 0.4});
  std::vector<double> grid;
  for (int k = 0; k <= 400; ++k) grid.push_back(-4 + 0.02 * k);
  const auto adaptive = spectrum(sup, 200.0, grid, QuadratureSpec::adaptive(1e-12));
  const auto gh = spectrum(sup, 200.0, grid, QuadratureSpec::gauss_hermite(200));
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(gh.p[i] == doctest::Approx(adaptive.p[i]).epsilon(1e-6));

  std::vector<double> zg, vals;
  const auto [lo, hi] = sup.support();
  for (int k = 0; k <= 4000; ++k) {
    const double z = lo + (hi - lo) * k / 4000;
    zg.push_back(z);
    vals.push_back(sup(z));
  }
  const auto sampled = HeightDensity::sampled(zg, vals, true);
  const auto from_samples = spectrum(sampled, 200.0, grid, QuadratureSpec::adaptive(1e-10));
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(from_samples.p[i] == doctest::Approx(adaptive.p[i]).epsilon(1e-4));
}

TEST_CASE("coherence time terms") {
  const auto k = ClockConstants{};
  CoherenceParams kp;
  kp.sigma_z = 0.01;
  kp.sigma_v = 1e-3;
  kp.alpha_w = 0.5;
  kp.phi = 0;
  kp.t = 1e-8;
  kp.p_bar = kp.m * k.g * kp.t;
  CHECK(coherence_time_full(kp, 0, 0.02).term3 == 0);

  kp.p_bar = 0;
  kp.alpha_w = std::pow(std::cos(pi / 8), 2);
  kp.phi = pi / 2;
  const auto at_singularity = coherence_time_full(kp, 0, 0.02);
  CHECK(std::isfinite(at_singularity.t_coh));
  kp.phi = pi / 2 - 1e-7;
  CHECK(coherence_time_full(kp, 0, 0.02).t_coh == doctest::Approx(at_singularity.t_coh).epsilon(1e-5));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  const double unit = k.c * k.c / k.g;
  for (int i = 0; i < 200; ++i) {
    const Superposition<double> s{(u(rng) - 0.5) * 0.1, (u(rng) - 0.5) * 0.1, 0.002 + 0.05 * u(rng), pi / 2 * u(rng),
                                  2 * pi * u(rng) * (1 - 1e-12)};
    CoherenceParams p;
    p.sigma_z = s.delta * unit;
    p.sigma_v = 1;
    p.alpha_w = std::pow(std::cos(s.theta), 2);
    p.phi = s.phi;
    const double reduced = coherence_time_reduced(p, s.z1 * unit, s.z2 * unit);
    CHECK(reduced == doctest::Approx(quantum_correction(s)).epsilon(1e-12).scale(1e-18));
    p.t = 2.5;
    p.sigma_v = 1e-30;
    CHECK(coherence_time_full(p, s.z1 * unit, s.z2 * unit).t_coh ==
          doctest::Approx(reduced * 2.5).epsilon(1e-9).scale(1e-18));
  }
  CoherenceParams bad;
  bad.alpha_w = 1.5;
  bad.sigma_v = 1;
  CHECK_THROWS_AS(coherence_time_reduced(bad, 0, 1), ConfigError);
}

TEST_CASE("quantum_correction vanishes exactly at the symmetric angles") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto s = random_sup(rng);
    for (double theta : {0.0, pi / 4, pi / 2}) {
      s.theta = theta;
      if (theta == pi / 4 && std::abs(std::cos(s.phi) + 1) < 1e-6 && s.z1 == s.z2) continue;
      CHECK(quantum_correction(s) == 0);
    }
    s.theta = 0.3;
    for (double phi : {pi / 2, 3 * pi / 2}) {
      s.phi = phi;
      CHECK(quantum_correction(s) == 0);
    }
  }
}
