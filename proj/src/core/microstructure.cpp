#include "core/microstructure.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "core/errors.hpp"
#include "core/types.hpp"

namespace hygrohom {

CellRaster::CellRaster(int resolution, std::vector<std::uint8_t> values)
    : m_(resolution), values_(std::move(values)) {
  if (m_ < 1) throw ConfigError("raster resolution must be positive");
  if (values_.size() != static_cast<std::size_t>(m_) * m_)
    throw ConfigError("raster value count does not match resolution");
  for (auto v : values_)
    if (v > 1) throw ConfigError("raster entries must be 0 or 1");
}

std::uint64_t CellRaster::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  mix(static_cast<std::uint64_t>(m_));
  for (auto v : values_) mix(v);
  return h;
}

namespace {

bool is_cement(const UnitCellGeometry& g, double y1, double y2) {
  if (const auto* disk = std::get_if<DiskInclusion>(&g)) {
    const double dx = y1 - 0.5, dy = y2 - 0.5;
    return dx * dx + dy * dy >= disk->radius * disk->radius;
  }
  if (const auto* lam = std::get_if<Laminate>(&g)) {
    const double t = lam->normal_axis == 0 ? y1 : y2;
    return t < lam->cement_fraction;
  }
  if (std::holds_alternative<Checkerboard>(g)) {
    return (y1 < 0.5) == (y2 < 0.5);
  }
  if (const auto* uni = std::get_if<UniformCell>(&g)) {
    return uni->phase == Phase::cement;
  }
  throw ConfigError("raster_file geometry must be loaded, not rasterized");
}

}  // namespace

CellRaster rasterize(const UnitCellGeometry& geometry, int resolution) {
  if (resolution < 2) throw ConfigError("rasterize: resolution must be at least 2");
  if (const auto* disk = std::get_if<DiskInclusion>(&geometry)) {
    if (!(disk->radius > 0.0) || !(disk->radius < 0.5))
      throw ConfigError("disk_inclusion radius must lie in (0, 0.5)");
  }
  if (const auto* lam = std::get_if<Laminate>(&geometry)) {
    if (lam->cement_fraction < 0.0 || lam->cement_fraction > 1.0)
      throw ConfigError("laminate cement_fraction must lie in [0, 1]");
    if (lam->normal_axis != 0 && lam->normal_axis != 1)
      throw ConfigError("laminate normal_axis must be x or y");
  }
  if (const auto* file = std::get_if<RasterFile>(&geometry)) {
    CellRaster r = load_raster(file->path);
    if (r.resolution() != resolution && resolution != 0)
      throw ConfigError("raster file resolution does not match requested resolution");
    return r;
  }

  std::vector<std::uint8_t> values(static_cast<std::size_t>(resolution) * resolution, 0);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const double y1 = (i + 0.5) / resolution;
      const double y2 = (j + 0.5) / resolution;
      values[static_cast<std::size_t>(j) * resolution + i] =
          is_cement(geometry, y1, y2) ? 1 : 0;
    }
  return CellRaster(resolution, std::move(values));
}

double volume_fraction(const CellRaster& raster) {
  double s = 0.0;
  for (auto v : raster.values()) s += v;
  return s / static_cast<double>(raster.values().size());
}

Phase phase_at(const std::array<double, 2>& x, double epsilon, const CellRaster& raster) {
  if (!(epsilon > 0.0)) throw ConfigError("phase_at: epsilon must be positive");
  const int m = raster.resolution();
  auto cell_of = [m](double t) {
    double frac = t - std::floor(t);  // periodic wrap into [0, 1)
    int c = static_cast<int>(frac * m);
    if (c >= m) c = m - 1;
    return c;
  };
  const int i = cell_of(x[0] / epsilon);
  const int j = cell_of(x[1] / epsilon);
  return raster.at(i, j) ? Phase::cement : Phase::aggregate;
}

CellRaster load_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open raster file: " + path);
  int m = 0;
  if (!(in >> m) || m < 1) throw ConfigError("raster file: invalid resolution line");
  std::vector<std::uint8_t> values(static_cast<std::size_t>(m) * m, 0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      int v;
      if (!(in >> v)) throw ConfigError("raster file: truncated data");
      if (v != 0 && v != 1) throw ConfigError("raster file: entries must be 0 or 1");
      values[static_cast<std::size_t>(j) * m + i] = static_cast<std::uint8_t>(v);
    }
  return CellRaster(m, std::move(values));
}

void save_raster(const CellRaster& raster, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write raster file: " + path);
  const int m = raster.resolution();
  out << m << "\n";
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) out << static_cast<int>(raster.at(i, j)) << (i + 1 < m ? " " : "");
    out << "\n";
  }
}

CellRaster random_raster(int resolution, std::uint64_t seed, double cement_probability) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(cement_probability);
  std::vector<std::uint8_t> values(static_cast<std::size_t>(resolution) * resolution, 0);
  for (auto& v : values) v = coin(rng) ? 1 : 0;
  return CellRaster(resolution, std::move(values));
}

MesoTiling::MesoTiling(double epsilon, CellRaster raster, int macro_resolution)
    : epsilon_(epsilon), resolution_(macro_resolution), raster_(std::move(raster)) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw ConfigError("meso tiling: epsilon must lie in (0, 1]");
  const double inv = 1.0 / epsilon;
  cells_ = static_cast<int>(std::lround(inv));
  if (std::abs(inv - cells_) > 1e-9)
    throw ConfigError("meso tiling: 1/epsilon must be an integer");
  const int pixels = cells_ * raster_.resolution();
  if (macro_resolution % pixels != 0)
    throw ConfigError(
        "meso tiling: macro resolution must be a multiple of raster_resolution/epsilon "
        "so that every element lies in one phase");
}

Phase MesoTiling::element_phase(int i, int j) const {
  const std::array<double, 2> c = {(i + 0.5) / resolution_, (j + 0.5) / resolution_};
  return phase_at(c, epsilon_, raster_);
}

}  // namespace hygrohom
