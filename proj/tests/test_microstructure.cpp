#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "core/errors.hpp"
#include "core/microstructure.hpp"
#include "doctest.h"

using namespace hygrohom;

TEST_CASE("uniform cement cell rasterizes to all ones") {
  const CellRaster r = rasterize(UniformCell{Phase::cement}, 8);
  CHECK(r.resolution() == 8);
  for (auto v : r.values()) CHECK(v == 1);
  CHECK(volume_fraction(r) == 1.0);
}

TEST_CASE("half laminate has exactly fraction one half for even resolutions") {
  const CellRaster r = rasterize(Laminate{0, 0.5}, 64);
  CHECK(volume_fraction(r) == 0.5);
}

TEST_CASE("disk inclusion fraction converges to the analytic area pi r^2") {
  // aggregate disk of radius 1/4 inside a cement matrix: the aggregate
  // fraction must approach pi/16
  const double exact = M_PI / 16.0;
  double prev_err = 0.0;
  for (int m : {64, 128, 256}) {
    const CellRaster r = rasterize(DiskInclusion{0.25}, m);
    const double aggregate_fraction = 1.0 - volume_fraction(r);
    const double err = std::abs(aggregate_fraction - exact);
    CHECK(err <= 2.0 / m);
    if (m > 64) CHECK(err <= prev_err * 0.75 + 1e-12);  // halving the cell size helps
    prev_err = err;
  }
}

TEST_CASE("rasterize rejects invalid geometry parameters") {
  CHECK_THROWS_AS(rasterize(DiskInclusion{0.75}, 16), ConfigError);
  CHECK_THROWS_AS(rasterize(DiskInclusion{0.0}, 16), ConfigError);
  CHECK_THROWS_AS(rasterize(Laminate{0, 1.5}, 16), ConfigError);
  CHECK_THROWS_AS(rasterize(UniformCell{}, 1), ConfigError);
}

TEST_CASE("complementarity: every raster entry is exactly 0 or 1") {
  const CellRaster r = random_raster(16, 99);
  for (auto v : r.values()) CHECK((v == 0 || v == 1));
}

TEST_CASE("volume fraction counts entries: hand-counted 4x4 fixture") {
  // 7 cement cells out of 16
  std::vector<std::uint8_t> values = {1, 0, 0, 1,  //
                                      0, 1, 0, 0,  //
                                      1, 1, 0, 0,  //
                                      0, 0, 1, 1};
  const CellRaster r(4, std::move(values));
  CHECK(volume_fraction(r) == doctest::Approx(7.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("phase_at reads the raster directly for epsilon = 1") {
  std::vector<std::uint8_t> values = {1, 0, 0, 0};
  const CellRaster r(2, std::move(values));
  CHECK(phase_at({0.1, 0.1}, 1.0, r) == Phase::cement);
  CHECK(phase_at({0.9, 0.1}, 1.0, r) == Phase::aggregate);
  CHECK(phase_at({0.1, 0.9}, 1.0, r) == Phase::aggregate);
}

TEST_CASE("phase_at is epsilon-periodic") {
  const CellRaster r = random_raster(8, 1234);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double eps = 0.2;
  for (int k = 0; k < 100; ++k) {
    const double x = dist(rng), y = dist(rng);
    CHECK(phase_at({x, y}, eps, r) == phase_at({x + eps, y}, eps, r));
    CHECK(phase_at({x, y}, eps, r) == phase_at({x, y + eps}, eps, r));
  }
}

TEST_CASE("phase_at on a quarter-scale laminate") {
  const CellRaster r = rasterize(Laminate{0, 0.5}, 16);
  const double eps = 0.25;
  // x/eps mod 1: 0.05 -> 0.2 (cement half), 0.20 -> 0.8 (aggregate half)
  CHECK(phase_at({0.05, 0.6}, eps, r) == Phase::cement);
  CHECK(phase_at({0.20, 0.6}, eps, r) == Phase::aggregate);
}

TEST_CASE("raster file round trip") {
  const CellRaster r = random_raster(12, 77);
  const std::string path =
      (std::filesystem::temp_directory_path() / "hygrohom_raster_test.txt").string();
  save_raster(r, path);
  const CellRaster back = load_raster(path);
  CHECK(back.resolution() == r.resolution());
  CHECK(back.values() == r.values());
  CHECK(back.hash() == r.hash());
  std::filesystem::remove(path);
}

TEST_CASE("raster file rejects malformed content") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "hygrohom_bad_raster.txt").string();
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2\n1 0\n1 2\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_raster(path), ConfigError);
  fs::remove(path);
  CHECK_THROWS_AS(load_raster(path), IoError);
}

TEST_CASE("meso tiling enforces grid alignment with the microstructure") {
  const CellRaster r = rasterize(Laminate{0, 0.5}, 2);
  CHECK_NOTHROW(MesoTiling(0.25, r, 32));  // m / eps = 8 divides 32
  CHECK_THROWS_AS(MesoTiling(0.25, r, 20), ConfigError);
  CHECK_THROWS_AS(MesoTiling(0.3, r, 32), ConfigError);  // 1/eps not an integer
  CHECK_THROWS_AS(MesoTiling(-0.25, r, 32), ConfigError);
}

TEST_CASE("meso tiling element phases reproduce the laminate bands") {
  const CellRaster r = rasterize(Laminate{0, 0.5}, 2);
  MesoTiling tiling(0.25, r, 16);  // 4 cells, 4 elements per cell side
  // within one period of 4 elements: first two cement, next two aggregate
  for (int i = 0; i < 16; ++i) {
    const Phase expected = (i % 4) < 2 ? Phase::cement : Phase::aggregate;
    CHECK(tiling.element_phase(i, 3) == expected);
  }
}
