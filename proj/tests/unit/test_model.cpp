#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qtd/density.hpp"
#include "qtd/model.hpp"
#include "qtd/quadrature.hpp"

using namespace qtd;
using std::numbers::pi;

namespace {

Superposition<double> random_sup(std::mt19937_64& rng, double max_sep_over_delta = 4) {
  std::uniform_real_distribution<double> u(0, 1);
  const double delta = 0.002 + 0.023 * u(rng);
  const double z1 = -0.05 + 0.1 * u(rng);
  const double z2 = z1 + (2 * u(rng) - 1) * max_sep_over_delta * delta;
  return {z1, z2, delta, pi / 2 * u(rng), 2 * pi * u(rng) * (1 - 1e-12)};
}

// Gauss-Hermite of the pointwise density about the packet midpoint.
double gh_mass(const Superposition<double>& s, int order) {
  const auto& rule = gauss_hermite<double>(order);
  const double m = (s.z1 + s.z2) / 2;
  double sum = 0;
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    const double x = rule.nodes(k);
    sum += rule.weights(k) * density_sup(s, m + s.delta * x) * std::exp(x * x);
  }
  return s.delta * sum;
}

}  // namespace

TEST_CASE("norm_constant examples") {
  const double single = std::pow(pi, -0.25);
  CHECK(norm_constant(Superposition<double>{0, 0, 1, 0, 1.3}) == doctest::Approx(single).epsilon(1e-15));
  CHECK(norm_constant(Superposition<double>{-0.7, 1.1, 1, pi / 4, pi / 2}) ==
        doctest::Approx(single).epsilon(1e-15));
  const Superposition<double> s{0, 2, 1, pi / 4, 0};
  const double expected = 1 / std::sqrt(std::sqrt(pi) * (1 + std::exp(-1.0)));
  CHECK(norm_constant(s) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(norm_constant(s) == doctest::Approx(0.6415).epsilon(2e-3));
  CHECK(gh_mass(s, 64) == doctest::Approx(1).epsilon(1e-13));
}

TEST_CASE("density_sup examples") {
  SUBCASE("theta = 0 is one Gaussian at z1") {
    const Superposition<double> s{0.3, -0.4, 0.2, 0, 2.0};
    for (double z : {0.0, 0.3, 0.5, 1.0}) {
      const double a = (z - 0.3) / 0.2;
      CHECK(density_sup(s, z) == doctest::Approx(std::exp(-a * a) / (std::sqrt(pi) * 0.2)).epsilon(1e-14));
    }
  }
  SUBCASE("destructive midpoint") {
    const Superposition<double> s{-0.5, 0.5, 0.4, pi / 4, pi};
    CHECK(std::abs(density_sup(s, 0.0)) < 1e-16);
  }
  SUBCASE("phi = pi/2 equals the mixture pointwise") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      auto s = random_sup(rng);
      s.phi = pi / 2;
      const auto m = matched_mixture(s);
      const auto d = HeightDensity::superposition(s);
      const auto [lo, hi] = d.support();
      for (int k = 0; k <= 50; ++k) {
        const double z = lo + (hi - lo) * k / 50;
        const double ref = density_mix(m, z);
        CHECK(std::abs(density_sup(s, z) - ref) <= 1e-14 * ref + 1e-300);
      }
    }
  }
}

TEST_CASE("density_mix examples") {
  const Mixture<double> single{0.1, 0.7, 0.3, pi / 2};
  for (double z : {0.2, 0.7, 1.1}) {
    const double a = (z - 0.7) / 0.3;
    CHECK(density_mix(single, z) == doctest::Approx(std::exp(-a * a) / (std::sqrt(pi) * 0.3)).epsilon(1e-14));
  }
  const Mixture<double> even{-0.2, 0.2, 0.1, pi / 4};
  for (double z : {0.05, 0.13, 0.4}) CHECK(density_mix(even, z) == doctest::Approx(density_mix(even, -z)));
  const double mass = adaptive_integrate([&](double z) { return density_mix(even, z); }, -2.0, 2.0,
                                         QuadratureSpec::adaptive(1e-14));
  CHECK(mass == doctest::Approx(1).epsilon(1e-13));
}

TEST_CASE("density invariants over random specs") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const auto s = random_sup(rng);
    CHECK(gh_mass(s, 64) == doctest::Approx(1).epsilon(1e-12));
    CHECK(gh_mass(s, 40) == doctest::Approx(1).epsilon(1e-12));
    const Superposition<double> swapped{s.z2, s.z1, s.delta, pi / 2 - s.theta, s.phi};
    const auto d = HeightDensity::superposition(s);
    const auto [lo, hi] = d.support();
    double peak = 0;
    for (int k = 0; k <= 40; ++k) {
      const double z = lo + (hi - lo) * k / 40;
      const double v = density_sup(s, z);
      CHECK(v >= 0);
      peak = std::max(peak, v);
      CHECK(density_sup(swapped, z) == doctest::Approx(v).epsilon(1e-13));
    }
    CHECK(density_sup(s, lo) < 1e-30 * peak);
    CHECK(density_sup(s, hi) < 1e-30 * peak);
  }
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(validate(Superposition<double>{0, 1, 0, 0.1, 0}), ConfigError);
  CHECK_THROWS_AS(validate(Superposition<double>{0, 1, 1, -0.1, 0}), ConfigError);
  CHECK_THROWS_AS(validate(Superposition<double>{0, 1, 1, pi / 2 + 1e-9, 0}), ConfigError);
  CHECK_THROWS_AS(validate(Superposition<double>{0, 1, 1, 0.1, 2 * pi}), ConfigError);
  CHECK_NOTHROW(validate(Superposition<double>{0, 1, 1, pi / 2, 0}));
  CHECK_THROWS_AS(validate(Superposition<double>{0.2, 0.2, 1, pi / 4, pi}), ConfigError);
  CHECK_NOTHROW(validate(Superposition<double>{0.2, 0.2, 1, pi / 4 + 0.01, pi}));
  try {
    validate(Superposition<double>{0, 1, 1, 3.0, 0});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "theta");
  }
  CHECK_THROWS_AS(HeightDensity::superposition({-0.45, 0, 0.01, 0.3, 0}), DomainError);
  CHECK_THROWS_AS(HeightDensity::point(-0.5), DomainError);
}

TEST_CASE("sampled density") {
  CHECK_THROWS_AS(HeightDensity::sampled({0, 1}, {1, 2}), ContractViolation);
  const auto d = HeightDensity::sampled({0, 1}, {1, 2}, true);
  CHECK(d(0.5) == doctest::Approx(1.0));
  CHECK(d(2.0) == 0);
  CHECK_THROWS_AS(HeightDensity::sampled({0, 0}, {1, 1}), ContractViolation);
}

TEST_CASE("derive_gamma0") {
  CHECK(derive_gamma0(1e15, 0) == 0);
  const double g1 = derive_gamma0(2.5e15, 1e-29);
  CHECK(derive_gamma0(2.5e15, 2e-29) == doctest::Approx(4 * g1).epsilon(1e-15));
  const double omega = 2.5e15;
  const double d = std::sqrt(2 * constants::kHbar * constants::kSpeedOfLight * constants::kVacuumPermittivity / 1.5e17);
  const auto p = PhysicalParams::with_dipole(omega, d);
  CHECK(p.gamma0 / omega == doctest::Approx(6.7e-18).epsilon(0.01));
  CHECK(p.frequency_ratio() == doctest::Approx(1.5e17).epsilon(1e-12));
}

TEST_CASE("physical params validation") {
  CHECK_THROWS_AS(PhysicalParams::with_gamma0(1.0, 2.0), ConfigError);
  CHECK_THROWS_AS(PhysicalParams::with_gamma0(-1.0, 1e-3), ConfigError);
  CHECK_THROWS_AS(PhysicalParams::with_dipole(1e15, 0.0), ConfigError);
  PhysicalParams p = PhysicalParams::with_gamma0(1e15, 1e7);
  p.g = 0;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "g");
  }
}

TEST_CASE("dimensionless scales") {
  const auto p = earth_aluminium_preset();
  CHECK(p.g == 9.80665);
  CHECK(p.c == 299792458.0);
  CHECK(p.frequency_ratio() == doctest::Approx(1.5e17).epsilon(1e-15));
  CHECK(p.mass == constants::kAtomicMassUnit);
  const auto sc = DimensionlessScales::from(p);
  CHECK(sc.nu(p.omega) == 0);
  CHECK(sc.s(0) == 0);
  CHECK(sc.zeta(2.0) == doctest::Approx(2 * sc.zeta(1.0)).epsilon(1e-15));
  CHECK(sc.zeta(1.0) == doctest::Approx(p.g / (p.c * p.c)).epsilon(1e-15));
  CHECK(sc.zeta(9.16e-3) == doctest::Approx(1e-18).epsilon(0.01));
  CHECK(sc.height_m(sc.zeta(3.7)) == doctest::Approx(3.7).epsilon(1e-15));
  CHECK(sc.omega_k(sc.nu(p.omega + 5 * p.gamma0)) == doctest::Approx(p.omega + 5 * p.gamma0));
}
