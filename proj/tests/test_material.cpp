#include <cmath>
#include <functional>
#include <random>

#include "core/errors.hpp"
#include "core/material.hpp"
#include "doctest.h"

using namespace hygrohom;

namespace {

// High-resolution Riemann-sum quadrature, the independent oracle for the
// tabulated primitives.
double riemann(const std::function<double(double)>& f, double a, double b, int n = 2000000) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += f(a + (k + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_CASE("default law set passes every assumption check") {
  const MaterialLaws laws = default_material_laws();
  const ValidationReport report = validate_assumptions(laws, 400);
  for (const auto& check : report.checks) {
    INFO(check.assumption, " ", check.name, " margin ", check.margin);
    CHECK(check.passed);
  }
  CHECK(report.all_passed);
}

TEST_CASE("validation requires a minimum sample count") {
  const MaterialLaws laws = default_material_laws();
  CHECK_THROWS_AS(validate_assumptions(laws, 50), ConfigError);
}

TEST_CASE("constants with positive alpha_1 fail assumption (v) by name") {
  MaterialLaws laws = default_material_laws();
  laws.constants.alpha_1 = 1.0;
  const ValidationReport report = validate_assumptions(laws, 200);
  CHECK(!report.all_passed);
  bool found = false;
  for (const auto& check : report.checks)
    if (!check.passed && check.name.find("alpha1 < 0") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("porosity with an understated Lipschitz constant fails (iii)") {
  MaterialLaws laws = default_material_laws();
  laws.porosity.lipschitz = 0.01 * (laws.porosity.phi_max - laws.porosity.phi_min) *
                            laws.porosity.decay;
  const ValidationReport report = validate_assumptions(laws, 300);
  bool found = false;
  for (const auto& check : report.checks)
    if (!check.passed && check.name.find("Lipschitz") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("moisture content follows the per-phase closed forms") {
  MaterialLaws laws = default_material_laws();
  // aggregate: rho_w phi_a S(p), with an easy-to-check configuration
  laws.constants.rho_w = 1.0;
  laws.porosity.aggregate = 0.1;
  const double p = -3e4;
  const double s = laws.saturation.value(p);
  CHECK(laws.moisture_content(Phase::aggregate, p, 0.7) ==
        doctest::Approx(0.1 * s).epsilon(1e-14));
  CHECK(laws.moisture_content(Phase::cement, p, 0.0) ==
        doctest::Approx(laws.porosity.cement(0.0) * s).epsilon(1e-14));
}

TEST_CASE("coefficient evaluations match an independent transcription at random states") {
  const MaterialLaws laws = default_material_laws();
  const auto& c = laws.constants;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pd(c.p_inf * 0.95, -1.0);
  std::uniform_real_distribution<double> td(c.theta_inf - 20.0, c.theta_inf + 40.0);
  std::uniform_real_distribution<double> rd(0.0, 0.8);
  for (int k = 0; k < 50; ++k) {
    const double p = pd(rng), theta = td(rng), r = rd(rng);
    const double s = laws.saturation.value(p);

    // b = rho_w [chi_c phi_c(r) + chi_a phi_a] S(p)
    CHECK(laws.moisture_content(Phase::cement, p, r) ==
          doctest::Approx(c.rho_w * laws.porosity.cement(r) * s).epsilon(1e-13));
    CHECK(laws.moisture_content(Phase::aggregate, p, r) ==
          doctest::Approx(c.rho_w * laws.porosity.aggregate * s).epsilon(1e-13));

    // sigma = rho_s c_s (1 - phi)
    CHECK(laws.solid_heat_capacity(Phase::cement, r) ==
          doctest::Approx(c.rho_sc * c.c_sc * (1.0 - laws.porosity.cement(r))).epsilon(1e-13));
    CHECK(laws.solid_heat_capacity(Phase::aggregate, r) ==
          doctest::Approx(c.rho_sa * c.c_sa * (1.0 - laws.porosity.aggregate)).epsilon(1e-13));

    // a = rho_w k_R(S(p)) / mu(theta) * k_phase
    const double pref = c.rho_w * laws.rel_perm.value(s) / laws.viscosity.value(theta);
    CHECK(laws.mobility(Phase::cement, p, theta, r) ==
          doctest::Approx(pref * laws.permeability.cement(r)).epsilon(1e-13));
    CHECK(laws.mobility(Phase::aggregate, p, theta, r) ==
          doctest::Approx(pref * laws.permeability.aggregate).epsilon(1e-13));

    // lambda per phase stays within the declared strict bounds
    const double lc = laws.thermal_conductivity(Phase::cement, p, theta, r);
    const double la = laws.thermal_conductivity(Phase::aggregate, p, theta, r);
    CHECK(lc > laws.conductivity.lower);
    CHECK(lc < laws.conductivity.upper);
    CHECK(la > laws.conductivity.lower);
    CHECK(la < laws.conductivity.upper);
  }
}

TEST_CASE("simple mobility sanity value") {
  MaterialLaws laws = default_material_laws();
  laws.constants.rho_w = 1.0;
  laws.permeability.aggregate = 2.0;
  // force k_R = 1 and mu = 1 by evaluating at full saturation with a flat law
  laws.rel_perm.floor = 0.5;
  laws.rel_perm.exponent = 1.0;
  laws.viscosity.reference = 1.0;
  laws.viscosity.slope = 0.0;
  laws.viscosity.lower = 0.5;
  laws.viscosity.upper = 2.0;
  const double theta = laws.viscosity.theta_ref;
  // at p = 0 the blended saturation is slightly below C_s; evaluate k_R there
  const double s = laws.saturation.value(0.0);
  const double expect = laws.rel_perm.value(s) * 2.0;
  CHECK(laws.mobility(Phase::aggregate, 0.0, theta, 0.0) ==
        doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("kirchhoff: constant permeability gives a linear map") {
  MaterialLaws laws = default_material_laws();
  // flat relative permeability: floor ~ 1 makes k_R identically 1
  laws.rel_perm.floor = 0.999999999;
  laws.rel_perm.exponent = 1.0;
  laws.finalize();
  const KirchhoffMap map(laws);
  CHECK(map.forward(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  const double p = -4.2e4;
  CHECK(map.forward(p) == doctest::Approx(p).epsilon(1e-9));
  CHECK(map.inverse(map.forward(p)) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("kirchhoff forward matches a Riemann-sum oracle") {
  const MaterialLaws laws = default_material_laws();
  const KirchhoffMap map(laws);
  auto integrand = [&](double z) { return map.truncated_permeability(z); };
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> pd(laws.constants.p_inf, 0.0);
  for (int k = 0; k < 20; ++k) {
    const double p = pd(rng);
    const double oracle = riemann(integrand, 0.0, p, 400000) * 1.0;
    const double got = map.forward(p);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("kirchhoff round trip and bounds") {
  const MaterialLaws laws = default_material_laws();
  const KirchhoffMap map(laws);
  const double k0 = map.k_lower(), k1 = map.k_upper();
  CHECK(k0 > 0.0);
  CHECK(k0 ==
        doctest::Approx(laws.rel_perm.value(laws.saturation.value(laws.constants.p_inf))));
  CHECK(k1 == doctest::Approx(laws.rel_perm.value(laws.saturation.max_saturation)));

  std::mt19937 rng(31);
  std::uniform_real_distribution<double> pd(laws.constants.p_inf * 1.4, 0.02 * -laws.constants.p_inf);
  double prev_u = -1e300;
  for (int k = 0; k < 200; ++k) {
    const double p = laws.constants.p_inf * 1.4 +
                     (0.02 * -laws.constants.p_inf - laws.constants.p_inf * 1.4) * k / 199.0;
    const double kt = map.truncated_permeability(p);
    CHECK(kt >= k0 * (1.0 - 1e-12));
    CHECK(kt <= k1 * (1.0 + 1e-12));
    if (p <= laws.constants.p_inf) CHECK(kt == k0);
    const double u = map.forward(p);
    CHECK(u > prev_u);  // strictly increasing
    prev_u = u;
    CHECK(std::abs(map.inverse(u) - p) <= 1e-10 * std::max(1.0, std::abs(p)));
  }
}

TEST_CASE("kirchhoff refuses values outside the tabulated range") {
  const MaterialLaws laws = default_material_laws();
  const KirchhoffMap map(laws);
  CHECK_THROWS_AS(map.inverse(map.u_table_max() * 1.5 + 1.0), SolverError);
  CHECK_THROWS_AS(map.forward(map.p_table_max() * 4.0 + 1.0), SolverError);
}

TEST_CASE("theta potential: zero at zero, closed form for linear saturation") {
  const MaterialLaws laws = default_material_laws();
  CHECK(laws.theta_potential(0.0) == 0.0);

  // with S'(z) ~ C on a narrow interval Theta(xi) ~ C xi^2 / 2; check against
  // the quadrature oracle instead for the real law
  auto integrand = [&](double z) { return laws.saturation.derivative(z) * z; };
  for (double p : {-1e4, -5e4, -9e4}) {
    const double oracle = riemann(integrand, 0.0, p, 400000);
    CHECK(laws.theta_potential(p) == doctest::Approx(oracle).epsilon(1e-8));
  }
  // nonnegative for negative pressures (drying range)
  for (double p : {-1e3, -2e4, -8e4}) CHECK(laws.theta_potential(p) >= 0.0);
}

TEST_CASE("potential inequality (Theta difference vs S difference) holds on random pairs") {
  const MaterialLaws laws = default_material_laws();
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> pd(laws.constants.p_inf, 0.0);
  for (int k = 0; k < 1000; ++k) {
    const double x1 = pd(rng), x2 = pd(rng);
    const double lhs = laws.theta_potential(x1) - laws.theta_potential(x2);
    const double rhs = (laws.saturation.value(x1) - laws.saturation.value(x2)) * x1;
    CHECK(lhs <= rhs + 1e-10 * std::abs(rhs) + 1e-12);
  }
}

TEST_CASE("hydration rate vanishes exactly at and below the cutoff pressure") {
  const MaterialLaws laws = default_material_laws();
  const double p_inf = laws.constants.p_inf;
  for (double p : {p_inf, p_inf * 1.2, p_inf - 1.0, p_inf * 3.0})
    CHECK(laws.hydration_rate(p, 300.0, 0.1) == 0.0);
  CHECK(laws.hydration_rate(p_inf * 0.5, 300.0, 0.1) > 0.0);
}

TEST_CASE("truncated permeability agrees with k_R(S(p)) above the cutoff") {
  const MaterialLaws laws = default_material_laws();
  const KirchhoffMap map(laws);
  for (double frac : {0.9, 0.5, 0.1, 0.01}) {
    const double p = laws.constants.p_inf * frac;
    CHECK(map.truncated_permeability(p) ==
          doctest::Approx(laws.rel_perm.value(laws.saturation.value(p))).epsilon(1e-14));
  }
}
