#include <cmath>
#include <filesystem>
#include <random>

#include "core/cell_solver.hpp"
#include "core/errors.hpp"
#include "core/microstructure.hpp"
#include "doctest.h"

using namespace hygrohom;

TEST_CASE("equal phase coefficients give a vanishing corrector") {
  const CellRaster raster = rasterize(Checkerboard{}, 8);
  const CorrectorField w = solve_corrector(raster, 3.7, 3.7, 0, 32);
  for (double v : w.values) CHECK(v == 0.0);
}

TEST_CASE("correctors are zero-mean and carry small residuals") {
  const CellRaster raster = rasterize(DiskInclusion{0.3}, 16);
  for (int d : {0, 1}) {
    const CorrectorField w = solve_corrector(raster, 4.0, 1.0, d, 64);
    CHECK(std::abs(w.mean()) < 1e-12);
    CHECK(w.residual < 1e-10);
  }
}

TEST_CASE("laminate corrector has the closed-form slopes") {
  // laminate normal to x, fraction 1/2, phases (a_c, a_a): the corrector for
  // direction 1 is piecewise linear with slopes (harm/a - 1)
  const CellRaster raster = rasterize(Laminate{0, 0.5}, 2);
  const double ac = 3.0, aa = 1.0;
  const int res = 32;
  const CorrectorField w = solve_corrector(raster, ac, aa, 0, res);

  const double harm = 2.0 * ac * aa / (ac + aa);
  const double slope_c = harm / ac - 1.0;  // = (aa-ac)/(ac+aa)
  const double slope_a = harm / aa - 1.0;
  CHECK(slope_c == doctest::Approx((aa - ac) / (ac + aa)).epsilon(1e-14));

  const double h = 1.0 / res;
  for (int i = 0; i < res; ++i) {
    const int j = res / 2;  // any row; the solution is independent of y
    const int n0 = j * res + i;
    const int n1 = j * res + (i + 1) % res;
    const double measured = (w.values[n1] - w.values[n0]) / h;
    const bool cement = (i + 0.5) / res < 0.5;
    const double expected = cement ? slope_c : slope_a;
    CHECK(measured == doctest::Approx(expected).epsilon(1e-8));
  }

  // direction 2: coefficient independent of y2 kills the corrector
  const CorrectorField w2 = solve_corrector(raster, ac, aa, 1, res);
  for (double v : w2.values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("effective tensor: uniform coefficient is exact") {
  const CellRaster raster = rasterize(UniformCell{Phase::cement}, 4);
  const double a0 = 2.31;
  const Mat2 a = effective_tensor(raster, a0, 123.0, 64);  // aggregate value unused
  CHECK(std::abs(a.a11 - a0) <= 1e-10);
  CHECK(std::abs(a.a22 - a0) <= 1e-10);
  CHECK(std::abs(a.a12) <= 1e-12);
  CHECK(std::abs(a.a21) <= 1e-12);
}

TEST_CASE("effective tensor of an aligned laminate equals (harmonic, arithmetic)") {
  const CellRaster raster = rasterize(Laminate{0, 0.5}, 2);
  const double ac = 2.5, aa = 0.7;
  const Mat2 a = effective_tensor(raster, ac, aa, 128);
  const double harm = 2.0 * ac * aa / (ac + aa);
  const double arith = 0.5 * (ac + aa);
  CHECK(a.a11 == doctest::Approx(harm).epsilon(1e-8));
  CHECK(a.a22 == doctest::Approx(arith).epsilon(1e-8));
  CHECK(std::abs(a.a12) < 1e-10);
  CHECK(std::abs(a.a21) < 1e-10);
}

TEST_CASE("checkerboard at contrast 10 approaches the dual value sqrt(10)") {
  const CellRaster raster = rasterize(Checkerboard{}, 2);
  const double target = std::sqrt(10.0);
  const Mat2 coarse = effective_tensor(raster, 10.0, 1.0, 128);
  const Mat2 fine = effective_tensor(raster, 10.0, 1.0, 256);
  const double err_coarse = std::abs(coarse.a11 - target) / target;
  const double err_fine = std::abs(fine.a11 - target) / target;
  CHECK(err_coarse < 0.05);
  CHECK(err_fine < err_coarse);
  // symmetry of the geometry forces an isotropic tensor
  CHECK(coarse.a11 == doctest::Approx(coarse.a22).epsilon(1e-6));
}

TEST_CASE("voigt-reuss bounds and symmetry for seeded random rasters") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> contrast_dist(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const CellRaster raster = random_raster(8, 1000 + trial);
    const double c = contrast_dist(rng);
    const Mat2 k = effective_tensor(raster, c, 1.0, 32);

    const double frac = volume_fraction(raster);
    const double arith = frac * c + (1.0 - frac);
    const double harm = 1.0 / (frac / c + (1.0 - frac));
    const auto ev = k.sym_eigenvalues();
    CHECK(ev[0] >= harm * (1.0 - 1e-9));
    CHECK(ev[1] <= arith * (1.0 + 1e-9));
    CHECK(ev[0] > 0.0);

    const double scale = std::abs(k.a11) + std::abs(k.a22);
    CHECK(std::abs(k.a12 - k.a21) <= 1e-10 * scale);
  }
}

TEST_CASE("centered disk cell yields an isotropic tensor") {
  const CellRaster raster = rasterize(DiskInclusion{0.3}, 64);
  const Mat2 k = effective_tensor(raster, 1.0, 5.0, 64);
  CHECK(k.a11 == doctest::Approx(k.a22).epsilon(1e-6));
}

TEST_CASE("contrast grid construction and trivial table") {
  const auto grid = log_contrast_grid(0.1, 10.0, 33);
  CHECK(grid.front() == doctest::Approx(0.1));
  CHECK(grid.back() == doctest::Approx(10.0));
  CHECK(grid.size() >= 66);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) CHECK(grid[k] < grid[k + 1]);

  const CellRaster raster = rasterize(Checkerboard{}, 2);
  const ContrastTable table = ContrastTable::build(raster, {1.0}, 16);
  const Mat2 k = table.query(1.0);
  CHECK(k.a11 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(k.a22 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(k.a12) < 1e-12);
}

TEST_CASE("contrast table nodes reproduce direct solves and interpolation is accurate") {
  const CellRaster raster = rasterize(DiskInclusion{0.25}, 8);
  const auto grid = log_contrast_grid(0.5, 8.0, 33);
  const ContrastTable table = ContrastTable::build(raster, grid, 32);

  // at a node the query returns the stored tensor
  const double node = table.contrasts()[5];
  const Mat2 direct_node = effective_tensor(raster, node, 1.0, 32);
  const Mat2 at_node = table.query(node);
  CHECK(at_node.a11 == doctest::Approx(direct_node.a11).epsilon(1e-12));

  // off-node interpolation against a direct solve
  const double c = 3.7;
  const Mat2 direct = effective_tensor(raster, c, 1.0, 32);
  const Mat2 interp = table.query(c);
  CHECK(interp.a11 == doctest::Approx(direct.a11).epsilon(1e-3));
  CHECK(interp.a22 == doctest::Approx(direct.a22).epsilon(1e-3));

  CHECK_THROWS_AS(table.query(20.0), SolverError);
  CHECK_THROWS_AS(table.query(0.01), SolverError);
}

TEST_CASE("contrast table artifact round trip and csv export") {
  namespace fs = std::filesystem;
  const CellRaster raster = rasterize(Laminate{1, 0.25}, 4);
  const ContrastTable table = ContrastTable::build(raster, log_contrast_grid(0.5, 2.0, 9), 16);
  const std::string path = (fs::temp_directory_path() / "hygrohom_table.json").string();
  table.save(path);
  const ContrastTable back = ContrastTable::load(path);
  CHECK(back.raster_hash() == table.raster_hash());
  CHECK(back.contrasts() == table.contrasts());
  const Mat2 a = table.query(1.3), b = back.query(1.3);
  CHECK(a.a11 == doctest::Approx(b.a11).epsilon(1e-14));
  fs::remove(path);

  const std::string csv = (fs::temp_directory_path() / "hygrohom_table.csv").string();
  table.export_csv(csv);
  CHECK(fs::file_size(csv) > 0);
  fs::remove(csv);
}

TEST_CASE("state-dependent effective tensors factor through the contrast") {
  MaterialLaws laws = default_material_laws();
  const CellRaster raster = rasterize(DiskInclusion{0.25}, 8);
  const auto moisture_grid =
      log_contrast_grid(laws.moisture_contrast_min(), laws.moisture_contrast_max());
  const ContrastTable table = ContrastTable::build(raster, moisture_grid, 32);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pd(laws.constants.p_inf * 0.9, -1e3);
  std::uniform_real_distribution<double> td(285.0, 320.0);
  std::uniform_real_distribution<double> rd(0.0, 0.6);
  for (int k = 0; k < 3; ++k) {
    const double p = pd(rng), theta = td(rng), r = rd(rng);
    const Mat2 queried = query_effective_moisture(table, laws, p, theta, r);
    // direct non-tabulated solve
    const double pref = laws.constants.rho_w * laws.rel_perm.value(laws.saturation.value(p)) /
                        laws.viscosity.value(theta);
    const Mat2 direct = effective_tensor(raster, pref * laws.permeability.cement(r),
                                         pref * laws.permeability.aggregate, 32);
    CHECK(queried.a11 == doctest::Approx(direct.a11).epsilon(1e-3));
    CHECK(queried.a22 == doctest::Approx(direct.a22).epsilon(1e-3));
    CHECK(queried.is_spd(1e-6));
  }

  // scaling: multiplying both phase coefficients by s scales the tensor by s
  const Mat2 base = effective_tensor(raster, 2.0, 1.0, 32);
  const Mat2 scaled = effective_tensor(raster, 6.0, 3.0, 32);
  CHECK(scaled.a11 == doctest::Approx(3.0 * base.a11).epsilon(1e-10));
  CHECK(scaled.a22 == doctest::Approx(3.0 * base.a22).epsilon(1e-10));
}

TEST_CASE("averaged coefficients have their closed forms") {
  const MaterialLaws laws = default_material_laws();
  const double p = -2.5e4, r = 0.3;

  // single phase
  CHECK(effective_moisture_content(1.0, laws, p, r) ==
        doctest::Approx(laws.moisture_content(Phase::cement, p, r)).epsilon(1e-14));
  // identical porosities collapse the mixture
  MaterialLaws same = laws;
  same.porosity.phi_min = same.porosity.aggregate;
  same.porosity.phi_max = same.porosity.aggregate;
  CHECK(effective_moisture_content(0.5, same, p, r) ==
        doctest::Approx(same.moisture_content(Phase::aggregate, p, r)).epsilon(1e-13));

  // against the raster average of the per-phase values
  const CellRaster raster = rasterize(DiskInclusion{0.25}, 128);
  const double chi = volume_fraction(raster);
  double avg_b = 0.0, avg_sigma = 0.0;
  for (auto v : raster.values()) {
    avg_b += laws.moisture_content(v ? Phase::cement : Phase::aggregate, p, r);
    avg_sigma += laws.solid_heat_capacity(v ? Phase::cement : Phase::aggregate, r);
  }
  avg_b /= static_cast<double>(raster.values().size());
  avg_sigma /= static_cast<double>(raster.values().size());
  CHECK(effective_moisture_content(chi, laws, p, r) ==
        doctest::Approx(avg_b).epsilon(1e-12));
  CHECK(effective_solid_heat_capacity(chi, laws, r) ==
        doctest::Approx(avg_sigma).epsilon(1e-12));
}

TEST_CASE("thermal effective tensor stays within the conductivity bounds") {
  const MaterialLaws laws = default_material_laws();
  const CellRaster raster = rasterize(Checkerboard{}, 2);
  const auto grid =
      log_contrast_grid(laws.thermal_contrast_min(), laws.thermal_contrast_max(), 17);
  const ContrastTable table = ContrastTable::build(raster, grid, 32);
  const Mat2 lam = query_effective_thermal(table, laws, -2e4, 300.0, 0.2);
  const auto ev = lam.sym_eigenvalues();
  CHECK(ev[0] >= laws.conductivity.lower * (1.0 - 1e-9));
  CHECK(ev[1] <= laws.conductivity.upper * (1.0 + 1e-9));
}
