#include "core/assemble.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace hygrohom {

namespace {

// Reference-square gradient products for Q1 basis functions, local node order
// (0,0), (1,0), (1,1), (0,1):
//   SXI  = int dNi/dxi  dNj/dxi,   SETA = int dNi/deta dNj/deta,
//   sxi/seta = signs of the (separable) gradient components.
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

void element_tensor_stiffness(const Mat2& p, double hx, double hy, double ke[4][4]) {
  const double cx = p.a11 * hy / hx;
  const double cy = p.a22 * hx / hy;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      ke[i][j] = cx * SXI[i][j] + cy * SETA[i][j] +
                 0.25 * (p.a12 * SGN_XI[i] * SGN_ETA[j] + p.a21 * SGN_XI[j] * SGN_ETA[i]);
}

double shape(int l, double xi, double eta) {
  switch (l) {
    case 0: return (1 - xi) * (1 - eta);
    case 1: return xi * (1 - eta);
    case 2: return xi * eta;
    default: return (1 - xi) * eta;
  }
}

std::array<double, 2> shape_grad(int l, double xi, double eta, double hx, double hy) {
  switch (l) {
    case 0: return {-(1 - eta) / hx, -(1 - xi) / hy};
    case 1: return {(1 - eta) / hx, -xi / hy};
    case 2: return {eta / hx, xi / hy};
    default: return {-eta / hx, (1 - xi) / hy};
  }
}

constexpr double GP = 0.21132486540518711775;  // (1 - 1/sqrt(3)) / 2
constexpr double GAUSS2[2] = {GP, 1.0 - GP};

}  // namespace

SparseOperator assemble_diffusion(const StructuredGrid& grid, std::span<const double> coeff) {
  std::vector<Mat2> tensors(grid.element_count());
  for (int e = 0; e < grid.element_count(); ++e) {
    if (!(coeff[e] > 0.0)) throw SolverError("assemble_diffusion: nonpositive coefficient");
    tensors[e] = Mat2::scalar(coeff[e]);
  }
  return assemble_diffusion_tensor(grid, tensors);
}

SparseOperator assemble_diffusion_tensor(const StructuredGrid& grid,
                                         std::span<const Mat2> coeff) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(grid.element_count()) * 16);
  double ke[4][4];
  for (int e = 0; e < grid.element_count(); ++e) {
    element_tensor_stiffness(coeff[e], grid.hx(), grid.hy(), ke);
    const auto n = grid.element_nodes(e);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) entries.push_back({n[i], n[j], ke[i][j]});
  }
  return SparseOperator::from_triplets(grid.node_count(), std::move(entries), true);
}

Field assemble_lumped_mass(const StructuredGrid& grid, std::span<const double> weight) {
  Field diag(grid.node_count(), 0.0);
  const double quarter = 0.25 * grid.element_area();
  for (int e = 0; e < grid.element_count(); ++e) {
    if (weight[e] < 0.0) throw SolverError("assemble_lumped_mass: negative weight");
    const auto n = grid.element_nodes(e);
    for (int l = 0; l < 4; ++l) diag[n[l]] += quarter * weight[e];
  }
  return diag;
}

RobinSystem assemble_robin(const StructuredGrid& grid, double coeff, double ambient) {
  const Field amb(grid.node_count(), ambient);
  return assemble_robin(grid, coeff, amb);
}

RobinSystem assemble_robin(const StructuredGrid& grid, double coeff,
                           std::span<const double> ambient_nodal) {
  if (coeff < 0.0) throw SolverError("assemble_robin: negative coefficient");
  RobinSystem sys;
  sys.diagonal.assign(grid.node_count(), 0.0);
  sys.load.assign(grid.node_count(), 0.0);
  for (const auto& edge : grid.boundary_edges()) {
    const double w = 0.5 * coeff * edge.length;
    sys.diagonal[edge.a] += w;
    sys.diagonal[edge.b] += w;
    sys.load[edge.a] += w * ambient_nodal[edge.a];
    sys.load[edge.b] += w * ambient_nodal[edge.b];
  }
  return sys;
}

Field boundary_lumped_mass(const StructuredGrid& grid) {
  Field diag(grid.node_count(), 0.0);
  for (const auto& edge : grid.boundary_edges()) {
    diag[edge.a] += 0.5 * edge.length;
    diag[edge.b] += 0.5 * edge.length;
  }
  return diag;
}

SparseOperator assemble_convection(const StructuredGrid& grid,
                                   std::span<const std::array<double, 2>> velocity) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(grid.element_count()) * 16);
  const double hx = grid.hx(), hy = grid.hy();
  const double area_w = 0.25 * hx * hy;  // weight per Gauss point
  for (int e = 0; e < grid.element_count(); ++e) {
    const auto& v = velocity[e];
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
      throw SolverError("assemble_convection: velocity not finite");
    if (v[0] == 0.0 && v[1] == 0.0) continue;
    const auto n = grid.element_nodes(e);
    double ce[4][4] = {};
    for (double gx : GAUSS2)
      for (double gy : GAUSS2)
        for (int i = 0; i < 4; ++i) {
          const auto gi = shape_grad(i, gx, gy, hx, hy);
          const double vg = v[0] * gi[0] + v[1] * gi[1];
          for (int j = 0; j < 4; ++j) ce[i][j] += area_w * shape(j, gx, gy) * vg;
        }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) entries.push_back({n[i], n[j], ce[i][j]});
  }
  return SparseOperator::from_triplets(grid.node_count(), std::move(entries), false);
}

SparseOperator assemble_flux_convection(const StructuredGrid& grid,
                                        std::span<const Mat2> prefactor,
                                        std::span<const double> u) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(grid.element_count()) * 16);
  const double hx = grid.hx(), hy = grid.hy();
  const double area_w = 0.25 * hx * hy;
  for (int e = 0; e < grid.element_count(); ++e) {
    const auto n = grid.element_nodes(e);
    const double u0 = u[n[0]], u1 = u[n[1]], u2 = u[n[2]], u3 = u[n[3]];
    double ce[4][4] = {};
    for (double gx : GAUSS2)
      for (double gy : GAUSS2) {
        // grad of the Q1 interpolant of u at the Gauss point
        const double ux = ((u1 - u0) * (1 - gy) + (u2 - u3) * gy) / hx;
        const double uy = ((u3 - u0) * (1 - gx) + (u2 - u1) * gx) / hy;
        const auto flux = prefactor[e].apply(ux, uy);
        for (int i = 0; i < 4; ++i) {
          const auto gi = shape_grad(i, gx, gy, hx, hy);
          const double fg = flux[0] * gi[0] + flux[1] * gi[1];
          for (int j = 0; j < 4; ++j) ce[i][j] += area_w * shape(j, gx, gy) * fg;
        }
      }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) entries.push_back({n[i], n[j], ce[i][j]});
  }
  return SparseOperator::from_triplets(grid.node_count(), std::move(entries), false);
}

SparseOperator diagonal_operator(const Field& diag) {
  std::vector<Triplet> entries;
  entries.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i)
    entries.push_back({static_cast<int>(i), static_cast<int>(i), diag[i]});
  return SparseOperator::from_triplets(static_cast<int>(diag.size()), std::move(entries),
                                       true);
}

double l2_inner(const StructuredGrid& grid, std::span<const double> a,
                std::span<const double> b) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != grid.node_count())
    throw SolverError("l2_inner: dimension mismatch");
  // Unit-weight lumped mass in closed form: each node owns a quarter of every
  // adjacent element.
  const double quarter = 0.25 * grid.element_area();
  double s = 0.0;
  for (int j = 0; j <= grid.ny(); ++j) {
    const int sy = (j == 0 || j == grid.ny()) ? 1 : 2;
    for (int i = 0; i <= grid.nx(); ++i) {
      const int sx = (i == 0 || i == grid.nx()) ? 1 : 2;
      const int n = grid.node_index(i, j);
      s += quarter * sx * sy * a[n] * b[n];
    }
  }
  return s;
}

double l2_norm(const StructuredGrid& grid, std::span<const double> field) {
  return std::sqrt(l2_inner(grid, field, field));
}

double boundary_l2_norm(const StructuredGrid& grid, std::span<const double> field) {
  const Field bm = boundary_lumped_mass(grid);
  double s = 0.0;
  for (int i = 0; i < grid.node_count(); ++i) s += bm[i] * field[i] * field[i];
  return std::sqrt(s);
}

}  // namespace hygrohom
