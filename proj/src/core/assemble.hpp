#pragma once

#include <array>
#include <span>

#include "core/grid.hpp"
#include "core/sparse.hpp"
#include "core/types.hpp"

namespace hygrohom {

// Q1 bilinear assembly on a uniform quad grid. Coefficients are sampled per
// element (constant over each element), which matches single-phase elements
// coming from an aligned tiling.

// Stiffness for a scalar coefficient per element. Symmetric positive
// semidefinite with zero row sums. Throws on nonpositive coefficients.
SparseOperator assemble_diffusion(const StructuredGrid& grid, std::span<const double> coeff);

// Stiffness for a symmetric 2x2 tensor coefficient per element.
SparseOperator assemble_diffusion_tensor(const StructuredGrid& grid,
                                         std::span<const Mat2> coeff);

// Row-sum lumped mass; entries are the diagonal. weight >= 0 per element.
Field assemble_lumped_mass(const StructuredGrid& grid, std::span<const double> weight);

// Lumped Robin boundary operator and load for flux coeff*(u - ambient).
// The operator is returned as nodal diagonal weights (coeff * edge-share).
struct RobinSystem {
  Field diagonal;  // coeff-weighted boundary lumped mass
  Field load;      // coeff * ambient * boundary lumped mass
};
RobinSystem assemble_robin(const StructuredGrid& grid, double coeff, double ambient);
RobinSystem assemble_robin(const StructuredGrid& grid, double coeff,
                           std::span<const double> ambient_nodal);

// Plain boundary lumped mass (unit coefficient), used for boundary norms.
Field boundary_lumped_mass(const StructuredGrid& grid);

// Galerkin convection for a frozen per-element velocity:
//   C[i][j] = sum_e int_e phi_j (V_e . grad phi_i) dx
SparseOperator assemble_convection(const StructuredGrid& grid,
                                   std::span<const std::array<double, 2>> velocity);

// Galerkin convection with the discrete flux P_e * grad(u_h) in place of the
// velocity, integrated with 2x2 Gauss so that the operator applied to the
// constant field reproduces the assembled diffusion flux of u exactly.
SparseOperator assemble_flux_convection(const StructuredGrid& grid,
                                        std::span<const Mat2> prefactor,
                                        std::span<const double> u);

SparseOperator diagonal_operator(const Field& diag);

// Lumped-mass weighted norms.
double l2_norm(const StructuredGrid& grid, std::span<const double> field);
double l2_inner(const StructuredGrid& grid, std::span<const double> a,
                std::span<const double> b);
double boundary_l2_norm(const StructuredGrid& grid, std::span<const double> field);

}  // namespace hygrohom
