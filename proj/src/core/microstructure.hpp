#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hygrohom {

// Two-phase periodic unit cell (0,1)^2. Phase 'c' is the cement paste, phase
// 'a' the aggregate; the binary raster stores 1 for cement.
enum class Phase { aggregate, cement };

struct DiskInclusion {
  double radius = 0.25;  // aggregate disk centered in a cement matrix
};
struct Laminate {
  int normal_axis = 0;  // 0 = x, 1 = y
  double cement_fraction = 0.5;
};
struct Checkerboard {};
struct UniformCell {
  Phase phase = Phase::cement;
};
struct RasterFile {
  std::string path;
};

using UnitCellGeometry =
    std::variant<DiskInclusion, Laminate, Checkerboard, UniformCell, RasterFile>;

class CellRaster {
 public:
  CellRaster() = default;
  CellRaster(int resolution, std::vector<std::uint8_t> values);

  int resolution() const { return m_; }
  // Cell (i, j) covers ((i, i+1) x (j, j+1)) / m.
  std::uint8_t at(int i, int j) const { return values_[j * m_ + i]; }
  const std::vector<std::uint8_t>& values() const { return values_; }

  std::uint64_t hash() const;

 private:
  int m_ = 0;
  std::vector<std::uint8_t> values_;
};

// Samples the analytic geometry at raster-cell centers.
CellRaster rasterize(const UnitCellGeometry& geometry, int resolution);

// Mean of the cement indicator, i.e. the homogenized chi_c*.
double volume_fraction(const CellRaster& raster);

// Periodic phase lookup chi(x / epsilon) on the macro domain.
Phase phase_at(const std::array<double, 2>& x, double epsilon, const CellRaster& raster);

// Plain-text raster format: first line m, then m rows of m space-separated
// 0/1 values, bottom row first.
CellRaster load_raster(const std::string& path);
void save_raster(const CellRaster& raster, const std::string& path);

// Seeded uniform random raster for property tests.
CellRaster random_raster(int resolution, std::uint64_t seed, double cement_probability = 0.5);

// epsilon-periodic tiling of the unit square with a grid that resolves the
// microstructure exactly (every element lies in one phase).
class MesoTiling {
 public:
  MesoTiling(double epsilon, CellRaster raster, int macro_resolution);

  double epsilon() const { return epsilon_; }
  int cells_per_side() const { return cells_; }
  int macro_resolution() const { return resolution_; }
  const CellRaster& raster() const { return raster_; }

  // Phase of macro element (i, j) on the aligned grid.
  Phase element_phase(int i, int j) const;

 private:
  double epsilon_;
  int cells_;
  int resolution_;
  CellRaster raster_;
};

}  // namespace hygrohom
