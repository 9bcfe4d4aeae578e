#include "core/cell_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "core/errors.hpp"
#include "core/sparse.hpp"
#include "json.hpp"

namespace hygrohom {

namespace {

// Reference gradient blocks shared with the macro assembly (square elements).
constexpr double SXI[4][4] = {{1.0 / 3, -1.0 / 3, -1.0 / 6, 1.0 / 6},
                              {-1.0 / 3, 1.0 / 3, 1.0 / 6, -1.0 / 6},
                              {-1.0 / 6, 1.0 / 6, 1.0 / 3, -1.0 / 3},
                              {1.0 / 6, -1.0 / 6, -1.0 / 3, 1.0 / 3}};
constexpr double SETA[4][4] = {{1.0 / 3, 1.0 / 6, -1.0 / 6, -1.0 / 3},
                               {1.0 / 6, 1.0 / 3, -1.0 / 3, -1.0 / 6},
                               {-1.0 / 6, -1.0 / 3, 1.0 / 3, 1.0 / 6},
                               {-1.0 / 3, -1.0 / 6, 1.0 / 6, 1.0 / 3}};
constexpr double SGN_XI[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double SGN_ETA[4] = {-1.0, -1.0, 1.0, 1.0};

struct PeriodicCell {
  int r;      // elements (= dofs) per side
  double h;   // 1 / r
  const CellRaster* raster;
  int pixels_per_cell;  // r / m

  int dof(int i, int j) const { return ((j % r + r) % r) * r + ((i % r + r) % r); }

  std::array<int, 4> element_dofs(int i, int j) const {
    return {dof(i, j), dof(i + 1, j), dof(i + 1, j + 1), dof(i, j + 1)};
  }

  double coeff(int i, int j, double ac, double aa) const {
    const int pi = i / pixels_per_cell, pj = j / pixels_per_cell;
    return raster->at(pi, pj) ? ac : aa;
  }
};

PeriodicCell make_cell(const CellRaster& raster, int resolution) {
  if (resolution < raster.resolution())
    throw ConfigError("cell resolution must be at least the raster resolution");
  if (resolution % raster.resolution() != 0)
    throw ConfigError("cell resolution must be a multiple of the raster resolution");
  return {resolution, 1.0 / resolution, &raster, resolution / raster.resolution()};
}

SparseOperator assemble_periodic_stiffness(const PeriodicCell& cell, double ac, double aa,
                                           bool pin_first_dof) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(cell.r) * cell.r * 16);
  for (int j = 0; j < cell.r; ++j)
    for (int i = 0; i < cell.r; ++i) {
      const double a = cell.coeff(i, j, ac, aa);
      const auto n = cell.element_dofs(i, j);
      for (int li = 0; li < 4; ++li)
        for (int lj = 0; lj < 4; ++lj) {
          if (pin_first_dof && (n[li] == 0 || n[lj] == 0)) continue;
          entries.push_back({n[li], n[lj], a * (SXI[li][lj] + SETA[li][lj])});
        }
    }
  if (pin_first_dof) entries.push_back({0, 0, 1.0});
  return SparseOperator::from_triplets(cell.r * cell.r, std::move(entries), true);
}

Field corrector_rhs(const PeriodicCell& cell, double ac, double aa, int direction) {
  Field rhs(static_cast<std::size_t>(cell.r) * cell.r, 0.0);
  // -int_e a e_d . grad(phi_l) = -a * h/2 * sign_l
  const double half_h = 0.5 * cell.h;
  const double* sgn = direction == 0 ? SGN_XI : SGN_ETA;
  for (int j = 0; j < cell.r; ++j)
    for (int i = 0; i < cell.r; ++i) {
      const double a = cell.coeff(i, j, ac, aa);
      const auto n = cell.element_dofs(i, j);
      for (int l = 0; l < 4; ++l) rhs[n[l]] -= a * half_h * sgn[l];
    }
  return rhs;
}

}  // namespace

double CorrectorField::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

CorrectorField solve_corrector(const CellRaster& raster, double coeff_cement,
                               double coeff_aggregate, int direction, int resolution,
                               double rel_tol) {
  if (!(coeff_cement > 0.0) || !(coeff_aggregate > 0.0))
    throw SolverError("solve_corrector: phase coefficients must be positive");
  if (direction != 0 && direction != 1)
    throw ConfigError("solve_corrector: direction must be 0 or 1");
  const PeriodicCell cell = make_cell(raster, resolution);

  CorrectorField w;
  w.resolution = resolution;
  w.direction = direction;

  Field rhs = corrector_rhs(cell, coeff_cement, coeff_aggregate, direction);
  double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    // Constant coefficient: the corrector vanishes identically.
    w.values.assign(static_cast<std::size_t>(cell.r) * cell.r, 0.0);
    return w;
  }

  SparseOperator pinned = assemble_periodic_stiffness(cell, coeff_cement, coeff_aggregate, true);
  Field rhs_pinned = rhs;
  rhs_pinned[0] = 0.0;
  SolveResult sol = solve_spd(pinned, rhs_pinned, rel_tol);
  w.values = std::move(sol.x);

  const double mean = [&w] {
    double s = 0.0;
    for (double v : w.values) s += v;
    return s / static_cast<double>(w.values.size());
  }();
  for (auto& v : w.values) v -= mean;

  SparseOperator full = assemble_periodic_stiffness(cell, coeff_cement, coeff_aggregate, false);
  Field res = full.multiply(w.values);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= rhs[i];
  w.residual = norm2(res) / rhs_norm;
  return w;
}

Mat2 effective_tensor(const CellRaster& raster, double coeff_cement, double coeff_aggregate,
                      int resolution, double rel_tol) {
  const PeriodicCell cell = make_cell(raster, resolution);
  const CorrectorField w0 = solve_corrector(raster, coeff_cement, coeff_aggregate, 0,
                                            resolution, rel_tol);
  const CorrectorField w1 = solve_corrector(raster, coeff_cement, coeff_aggregate, 1,
                                            resolution, rel_tol);

  // A[i][d] = sum_e a_e * area * (delta_id + d w_d / d y_i at the centroid);
  // centroid gradients are exact element averages for Q1.
  Mat2 a{};
  const double area = cell.h * cell.h;
  auto grad = [&cell](const Field& v, int i, int j) -> std::array<double, 2> {
    const auto n = cell.element_dofs(i, j);
    const double gx = 0.5 * ((v[n[1]] + v[n[2]]) - (v[n[0]] + v[n[3]])) / cell.h;
    const double gy = 0.5 * ((v[n[3]] + v[n[2]]) - (v[n[0]] + v[n[1]])) / cell.h;
    return {gx, gy};
  };
  for (int j = 0; j < cell.r; ++j)
    for (int i = 0; i < cell.r; ++i) {
      const double ae = cell.coeff(i, j, coeff_cement, coeff_aggregate);
      const auto g0 = grad(w0.values, i, j);
      const auto g1 = grad(w1.values, i, j);
      a.a11 += ae * area * (1.0 + g0[0]);
      a.a21 += ae * area * g0[1];
      a.a12 += ae * area * g1[0];
      a.a22 += ae * area * (1.0 + g1[1]);
    }
  return a;
}

std::vector<double> log_contrast_grid(double c_min, double c_max, int per_decade) {
  if (!(c_min > 0.0) || !(c_max >= c_min))
    throw ConfigError("contrast grid: need 0 < c_min <= c_max");
  if (c_max == c_min) return {c_min};
  const double decades = std::log10(c_max / c_min);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k)
    grid[k] = c_min * std::pow(c_max / c_min, static_cast<double>(k) / (n - 1));
  grid.front() = c_min;
  grid.back() = c_max;
  return grid;
}

ContrastTable ContrastTable::build(const CellRaster& raster, std::vector<double> contrasts,
                                   int resolution, int threads) {
  if (contrasts.empty()) throw ConfigError("contrast table: empty contrast grid");
  if (!std::is_sorted(contrasts.begin(), contrasts.end()))
    throw ConfigError("contrast table: contrast grid must be monotone increasing");
  for (double c : contrasts)
    if (!(c > 0.0)) throw ConfigError("contrast table: contrasts must be positive");

  ContrastTable table;
  table.raster_hash_ = raster.hash();
  table.resolution_ = resolution;
  table.contrasts_ = std::move(contrasts);
  table.tensors_.resize(table.contrasts_.size());

  if (threads <= 0) {
    if (const char* env = std::getenv("HYGROHOM_THREADS"))
      threads = std::max(1, std::atoi(env));
    else
      threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min<int>(threads, static_cast<int>(table.contrasts_.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= table.contrasts_.size()) break;
      table.tensors_[k] = effective_tensor(raster, table.contrasts_[k], 1.0, resolution);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  table.prepare_interpolation();
  return table;
}

void ContrastTable::prepare_interpolation() {
  const std::size_t n = contrasts_.size();
  slopes_.assign(n, Mat2{});
  if (n < 2) return;

  auto component = [](Mat2& m, int c) -> double& {
    switch (c) {
      case 0: return m.a11;
      case 1: return m.a12;
      case 2: return m.a21;
      default: return m.a22;
    }
  };

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::log(contrasts_[k]);

  for (int c = 0; c < 4; ++c) {
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = x[k + 1] - x[k];
      delta[k] = (component(tensors_[k + 1], c) - component(tensors_[k], c)) / h[k];
    }
    std::vector<double> m(n, 0.0);
    if (n == 2) {
      m[0] = m[1] = delta[0];
    } else {
      // Fritsch-Carlson monotone slopes.
      auto limit_end = [](double m0, double d0) {
        if (m0 * d0 <= 0.0) return 0.0;
        if (std::abs(m0) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m0;
      };
      m[0] = limit_end(((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]),
                       delta[0]);
      m[n - 1] = limit_end(((2.0 * h[n - 2] + h[n - 3]) * delta[n - 2] -
                            h[n - 2] * delta[n - 3]) /
                               (h[n - 2] + h[n - 3]),
                           delta[n - 2]);
      for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) {
          m[k] = 0.0;
        } else {
          const double w1 = 2.0 * h[k] + h[k - 1];
          const double w2 = h[k] + 2.0 * h[k - 1];
          m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) component(slopes_[k], c) = m[k];
  }
}

Mat2 ContrastTable::query(double contrast) const {
  if (contrasts_.empty()) throw SolverError("contrast table: empty");
  const double lo = contrasts_.front(), hi = contrasts_.back();
  const double slack = 1e-9;
  if (contrast < lo * (1.0 - slack) || contrast > hi * (1.0 + slack))
    throw SolverError("contrast table: query outside tabulated range");
  if (contrasts_.size() == 1) return tensors_.front();
  const double x = std::log(std::clamp(contrast, lo, hi));

  auto it = std::upper_bound(contrasts_.begin(), contrasts_.end(), contrast);
  std::size_t k = it == contrasts_.begin() ? 0 : (it - contrasts_.begin()) - 1;
  k = std::min(k, contrasts_.size() - 2);

  const double x0 = std::log(contrasts_[k]), x1 = std::log(contrasts_[k + 1]);
  const double h = x1 - x0, t = (x - x0) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);

  auto comp = [](const Mat2& m, int c) {
    switch (c) {
      case 0: return m.a11;
      case 1: return m.a12;
      case 2: return m.a21;
      default: return m.a22;
    }
  };
  Mat2 out;
  double* o[4] = {&out.a11, &out.a12, &out.a21, &out.a22};
  for (int c = 0; c < 4; ++c)
    *o[c] = h00 * comp(tensors_[k], c) + h * h10 * comp(slopes_[k], c) +
            h01 * comp(tensors_[k + 1], c) + h * h11 * comp(slopes_[k + 1], c);
  return out;
}

std::string ContrastTable::to_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = "contrast_table";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(raster_hash_));
  j["raster_hash"] = buf;
  j["resolution"] = resolution_;
  j["contrasts"] = contrasts_;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : tensors_) tensors.push_back({t.a11, t.a12, t.a21, t.a22});
  j["tensors"] = tensors;
  return j.dump(2);
}

ContrastTable ContrastTable::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("kind", "") != "contrast_table")
    throw ConfigError("contrast table artifact: wrong kind");
  if (j.value("format_version", 0) != 1)
    throw ConfigError("contrast table artifact: unsupported format version");
  ContrastTable table;
  table.raster_hash_ = std::stoull(j.at("raster_hash").get<std::string>(), nullptr, 16);
  table.resolution_ = j.at("resolution").get<int>();
  table.contrasts_ = j.at("contrasts").get<std::vector<double>>();
  for (const auto& t : j.at("tensors"))
    table.tensors_.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>(),
                              t[3].get<double>()});
  if (table.tensors_.size() != table.contrasts_.size())
    throw ConfigError("contrast table artifact: size mismatch");
  table.prepare_interpolation();
  return table;
}

void ContrastTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write contrast table: " + path);
  out << to_json() << "\n";
}

ContrastTable ContrastTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open contrast table: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

void ContrastTable::export_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write contrast table csv: " + path);
  out << "contrast,k11,k12,k21,k22\n";
  char buf[256];
  for (std::size_t k = 0; k < contrasts_.size(); ++k) {
    const auto& t = tensors_[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", contrasts_[k], t.a11,
                  t.a12, t.a21, t.a22);
    out << buf;
  }
}

Mat2 query_effective_moisture(const ContrastTable& table, const MaterialLaws& laws,
                              double p, double theta, double r) {
  const double contrast = laws.permeability.cement(r) / laws.permeability.aggregate;
  const double scale = laws.constants.rho_w *
                       laws.rel_perm.value(laws.saturation.value(p)) /
                       laws.viscosity.value(theta) * laws.permeability.aggregate;
  return table.query(contrast).scaled(scale);
}

Mat2 query_effective_thermal(const ContrastTable& table, const MaterialLaws& laws,
                             double p, double theta, double r) {
  const double la = laws.thermal_conductivity(Phase::aggregate, p, theta, r);
  const double lc = laws.thermal_conductivity(Phase::cement, p, theta, r);
  return table.query(lc / la).scaled(la);
}

double effective_moisture_content(double chi_star, const MaterialLaws& laws, double p,
                                  double r) {
  return laws.constants.rho_w *
         (chi_star * laws.porosity.cement(r) + (1.0 - chi_star) * laws.porosity.aggregate) *
         laws.saturation.value(p);
}

double effective_solid_heat_capacity(double chi_star, const MaterialLaws& laws, double r) {
  return chi_star * laws.constants.rho_sc * laws.constants.c_sc *
             (1.0 - laws.porosity.cement(r)) +
         (1.0 - chi_star) * laws.constants.rho_sa * laws.constants.c_sa *
             (1.0 - laws.porosity.aggregate);
}

}  // namespace hygrohom
