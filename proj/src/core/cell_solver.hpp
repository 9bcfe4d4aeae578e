#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/material.hpp"
#include "core/microstructure.hpp"
#include "core/types.hpp"

namespace hygrohom {

// Periodic corrector on the unit cell: zero-mean Q1 field on an R x R grid
// with opposite faces identified.
struct CorrectorField {
  int resolution = 0;
  int direction = 0;  // 0 or 1
  Field values;       // R*R periodic dofs, row-major

  double mean() const;
  // True relative residual of the periodic cell problem.
  double residual = 0.0;
};

// Solves -div_y( a(y) (e_d + grad w) ) = 0 on the periodic cell with
// per-phase coefficients; zero-mean normalization.
CorrectorField solve_corrector(const CellRaster& raster, double coeff_cement,
                               double coeff_aggregate, int direction, int resolution,
                               double rel_tol = 1e-12);

// Effective tensor int_Y a (I + grad_y w) dy.
Mat2 effective_tensor(const CellRaster& raster, double coeff_cement, double coeff_aggregate,
                      int resolution, double rel_tol = 1e-12);

// Normalized effective tensors K*(c) for coefficient chi_c * c + chi_a * 1,
// precomputed on a monotone contrast grid, interpolated monotone-cubically in
// log-contrast. The multiplicative structure of the coefficient functions
// makes the state dependence enter only through this scalar contrast.
class ContrastTable {
 public:
  static ContrastTable build(const CellRaster& raster, std::vector<double> contrasts,
                             int resolution, int threads = 0);

  Mat2 query(double contrast) const;

  const std::vector<double>& contrasts() const { return contrasts_; }
  const std::vector<Mat2>& tensors() const { return tensors_; }
  std::uint64_t raster_hash() const { return raster_hash_; }
  int resolution() const { return resolution_; }

  std::string to_json() const;
  static ContrastTable from_json(const std::string& text);
  void save(const std::string& path) const;
  static ContrastTable load(const std::string& path);
  void export_csv(const std::string& path) const;

 private:
  std::uint64_t raster_hash_ = 0;
  int resolution_ = 0;
  std::vector<double> contrasts_;
  std::vector<Mat2> tensors_;
  // Fritsch-Carlson slopes per tensor entry in log-contrast.
  std::vector<Mat2> slopes_;
  void prepare_interpolation();
};

// Log-spaced contrast grid covering [c_min, c_max] with the given node
// density per decade; always includes both endpoints.
std::vector<double> log_contrast_grid(double c_min, double c_max, int per_decade = 33);

// State-dependent effective tensors assembled from the tables.
Mat2 query_effective_moisture(const ContrastTable& table, const MaterialLaws& laws,
                              double p, double theta, double r);
Mat2 query_effective_thermal(const ContrastTable& table, const MaterialLaws& laws,
                             double p, double theta, double r);

// Averaged coefficients; closed forms, no cell solve needed.
double effective_moisture_content(double chi_star, const MaterialLaws& laws, double p,
                                  double r);
double effective_solid_heat_capacity(double chi_star, const MaterialLaws& laws, double r);

}  // namespace hygrohom
