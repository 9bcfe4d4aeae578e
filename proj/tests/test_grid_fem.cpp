#include <array>
#include <cmath>
#include <random>

#include "core/assemble.hpp"
#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/sparse.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace hygrohom;

namespace {

Field random_field(int n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(n);
  for (auto& v : f) v = dist(rng);
  return f;
}

}  // namespace

TEST_CASE("diffusion stiffness on a single unit element matches the hand-integrated matrix") {
  StructuredGrid grid(1, 1);
  const Field coeff(1, 1.0);
  const SparseOperator k = assemble_diffusion(grid, coeff);

  // int grad(N_i) . grad(N_j) over the unit square in global node order
  // (0,0), (1,0), (0,1), (1,1): diagonal 2/3, edge neighbors -1/6, the
  // diagonally opposite pair -1/3.
  const double expected[4][4] = {{2.0 / 3, -1.0 / 6, -1.0 / 6, -1.0 / 3},
                                 {-1.0 / 6, 2.0 / 3, -1.0 / 3, -1.0 / 6},
                                 {-1.0 / 6, -1.0 / 3, 2.0 / 3, -1.0 / 6},
                                 {-1.0 / 3, -1.0 / 6, -1.0 / 6, 2.0 / 3}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(k.entry(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-14));
}

TEST_CASE("diffusion operator kills constants and has zero row sums") {
  StructuredGrid grid(7, 5);
  Field coeff(grid.element_count());
  for (int e = 0; e < grid.element_count(); ++e) coeff[e] = 0.5 + 0.1 * (e % 7);
  const SparseOperator k = assemble_diffusion(grid, coeff);

  const Field ones(grid.node_count(), 3.25);
  const Field ku = k.multiply(ones);
  for (double v : ku) CHECK(std::abs(v) < 1e-13);

  for (int r = 0; r < k.dim(); ++r) {
    double row_sum = 0.0;
    for (int p = k.row_begin(r); p < k.row_end(r); ++p) row_sum += k.value(p);
    CHECK(std::abs(row_sum) < 1e-14);
  }
}

TEST_CASE("diffusion operator is linear in the coefficient and exactly symmetric") {
  StructuredGrid grid(6, 6);
  Field coeff(grid.element_count(), 1.3);
  const SparseOperator k1 = assemble_diffusion(grid, coeff);
  for (auto& c : coeff) c *= 4.0;
  const SparseOperator k4 = assemble_diffusion(grid, coeff);

  for (int r = 0; r < k1.dim(); ++r)
    for (int p = k1.row_begin(r); p < k1.row_end(r); ++p) {
      CHECK(k4.entry(r, k1.col(p)) == doctest::Approx(4.0 * k1.value(p)).epsilon(1e-14));
      CHECK(k1.entry(k1.col(p), r) == k1.value(p));  // exact symmetry
    }
}

TEST_CASE("diffusion assembly rejects nonpositive coefficients") {
  StructuredGrid grid(2, 2);
  Field coeff(grid.element_count(), 1.0);
  coeff[1] = 0.0;
  CHECK_THROWS_AS(assemble_diffusion(grid, coeff), SolverError);
}

TEST_CASE("lumped mass: partition of unity, zero weight, linear-weight total") {
  StructuredGrid grid(2, 2);
  const Field unit(grid.element_count(), 1.0);
  const Field diag = assemble_lumped_mass(grid, unit);
  double total = 0.0;
  for (double v : diag) {
    CHECK(v > 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  const Field zero(grid.element_count(), 0.0);
  for (double v : assemble_lumped_mass(grid, zero)) CHECK(v == 0.0);

  // weight sampled at centroids from w(x) = x; midpoint sampling makes the
  // total mass int_0^1 x dx = 1/2 exactly
  StructuredGrid fine(16, 16);
  Field linw(fine.element_count());
  for (int e = 0; e < fine.element_count(); ++e) linw[e] = fine.element_centroid(e)[0];
  double mass = 0.0;
  for (double v : assemble_lumped_mass(fine, linw)) mass += v;
  CHECK(mass == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("robin: zero coefficient, equilibrium, and the linear patch test") {
  StructuredGrid grid(8, 8);

  const RobinSystem zero = assemble_robin(grid, 0.0, 5.0);
  for (double v : zero.diagonal) CHECK(v == 0.0);
  for (double v : zero.load) CHECK(v == 0.0);

  // u == ambient is an equilibrium of the Robin pair
  const double ambient = 7.5;
  const RobinSystem rs = assemble_robin(grid, 2.0, ambient);
  for (int i = 0; i < grid.node_count(); ++i)
    CHECK(rs.diagonal[i] * ambient - rs.load[i] == doctest::Approx(0.0).epsilon(1e-14));

  // patch test: K + Robin reproduces u = a + b x + c y when the ambient data
  // carries the exact Robin trace of the linear field
  const double k = 2.0, c = 3.0, a = 1.0, bx = -2.0, cy = 0.5;
  Field coeff(grid.element_count(), k);
  const SparseOperator stiffness = assemble_diffusion(grid, coeff);

  Field exact(grid.node_count()), ambient_nodal(grid.node_count(), 0.0);
  for (int n = 0; n < grid.node_count(); ++n) {
    const auto xy = grid.node_position(n);
    exact[n] = a + bx * xy[0] + cy * xy[1];
  }
  // Per side the Robin trace is g = u + (k/c) du/dn; a corner carries the
  // edge-length weighted average of the traces of the two meeting sides,
  // matching the per-edge lumped assembly.
  Field gsum(grid.node_count(), 0.0), wsum(grid.node_count(), 0.0);
  auto accumulate = [&](int n, double edge_len, double dudn) {
    gsum[n] += 0.5 * edge_len * (exact[n] + (k / c) * dudn);
    wsum[n] += 0.5 * edge_len;
  };
  for (const auto& edge : grid.boundary_edges()) {
    const auto pa = grid.node_position(edge.a);
    const auto pb = grid.node_position(edge.b);
    double dudn;
    if (pa[0] == pb[0])  // vertical edge, left or right side
      dudn = pa[0] == 0.0 ? -bx : bx;
    else
      dudn = pa[1] == 0.0 ? -cy : cy;
    accumulate(edge.a, edge.length, dudn);
    accumulate(edge.b, edge.length, dudn);
  }
  for (int n : grid.boundary_nodes()) ambient_nodal[n] = gsum[n] / wsum[n];

  const RobinSystem patch = assemble_robin(grid, c, ambient_nodal);
  const SparseOperator robin_op = diagonal_operator(patch.diagonal);
  const SparseOperator system = SparseOperator::sum({&stiffness, &robin_op});
  const SolveResult sol = solve_spd(system, patch.load, 1e-12);
  CHECK(testsupport::max_abs_diff(sol.x, exact) < 1e-10);
}

TEST_CASE("robin energy is nonnegative") {
  StructuredGrid grid(5, 9);
  const RobinSystem rs = assemble_robin(grid, 1.7, 0.0);
  const Field u = random_field(grid.node_count(), 21);
  double energy = 0.0;
  for (int i = 0; i < grid.node_count(); ++i) energy += rs.diagonal[i] * u[i] * u[i];
  CHECK(energy >= 0.0);
}

TEST_CASE("convection: zero velocity, linearity, and a discrete divergence-free field") {
  StructuredGrid grid(6, 6);
  std::vector<std::array<double, 2>> vel(grid.element_count(), {0.0, 0.0});
  const SparseOperator zero = assemble_convection(grid, vel);
  for (int r = 0; r < zero.dim(); ++r)
    for (int p = zero.row_begin(r); p < zero.row_end(r); ++p)
      CHECK(zero.value(p) == 0.0);

  for (int e = 0; e < grid.element_count(); ++e) vel[e] = {0.3 + 0.01 * e, -0.2};
  const SparseOperator c1 = assemble_convection(grid, vel);
  for (auto& v : vel) {
    v[0] *= 2.0;
    v[1] *= 2.0;
  }
  const SparseOperator c2 = assemble_convection(grid, vel);
  for (int r = 0; r < c1.dim(); ++r)
    for (int p = c1.row_begin(r); p < c1.row_end(r); ++p)
      CHECK(c2.entry(r, c1.col(p)) == doctest::Approx(2.0 * c1.value(p)).epsilon(1e-14));

  // velocity = rot(psi) with psi vanishing on the boundary: applying the
  // operator to a constant temperature gives exactly zero (discrete
  // integration by parts)
  Field psi(grid.node_count());
  for (int n = 0; n < grid.node_count(); ++n) {
    const auto xy = grid.node_position(n);
    psi[n] = std::sin(M_PI * xy[0]) * std::sin(M_PI * xy[1]) * (1.0 + 0.3 * xy[0]);
  }
  for (int n : grid.boundary_nodes()) psi[n] = 0.0;
  std::vector<std::array<double, 2>> rot(grid.element_count());
  for (int e = 0; e < grid.element_count(); ++e) {
    const auto g = grid.element_gradient(psi, e);
    rot[e] = {g[1], -g[0]};
  }
  const SparseOperator conv = assemble_convection(grid, rot);
  const Field ones(grid.node_count(), 4.0);
  const Field r = conv.multiply(ones);
  for (double v : r) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("flux convection applied to a constant reproduces the diffusion flux exactly") {
  StructuredGrid grid(9, 9);
  std::vector<Mat2> prefactor(grid.element_count());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  for (auto& p : prefactor) {
    const double a = dist(rng), b = dist(rng), off = 0.2 * dist(rng);
    p = {a, off, off, b};
  }
  const Field u = random_field(grid.node_count(), 13, -3.0, 2.0);

  const SparseOperator conv = assemble_flux_convection(grid, prefactor, u);
  const SparseOperator k = assemble_diffusion_tensor(grid, prefactor);
  const Field ku = k.multiply(u);

  const Field ones(grid.node_count(), 1.0);
  const Field c1 = conv.multiply(ones);
  for (int i = 0; i < grid.node_count(); ++i)
    CHECK(c1[i] == doctest::Approx(ku[i]).epsilon(1e-12));
}

TEST_CASE("solve_spd: identity, hand-solved 2x2, and residual recomputation") {
  {
    std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}};
    const SparseOperator eye = SparseOperator::from_triplets(2, t, true);
    const SolveResult sol = solve_spd(eye, {2.5, -1.0}, 1e-10);
    CHECK(sol.x[0] == doctest::Approx(2.5));
    CHECK(sol.x[1] == doctest::Approx(-1.0));
  }
  {
    std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 2.0}};
    const SparseOperator m = SparseOperator::from_triplets(2, t, true);
    const SolveResult sol = solve_spd(m, {3.0, 3.0}, 1e-12);
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-10));
  }
  {
    // random SPD 50x50 via A = B^T B + I
    const int n = 50;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    testsupport::Matrix b(n, std::vector<double>(n));
    for (auto& row : b)
      for (auto& v : row) v = dist(rng);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = i == j ? 1.0 : 0.0;
        for (int k2 = 0; k2 < n; ++k2) s += b[k2][i] * b[k2][j];
        t.push_back({i, j, s});
      }
    const SparseOperator a = SparseOperator::from_triplets(n, t, true);
    Field rhs(n);
    for (auto& v : rhs) v = dist(rng);
    const double tol = 1e-9;
    const SolveResult sol = solve_spd(a, rhs, tol);
    Field res = a.multiply(sol.x);
    for (int i = 0; i < n; ++i) res[i] -= rhs[i];
    CHECK(norm2(res) <= tol * norm2(rhs));
    CHECK(sol.converged);
  }
}

TEST_CASE("solve_spd rejects out-of-range tolerances and non-SPD systems") {
  std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}};
  const SparseOperator eye = SparseOperator::from_triplets(2, t, true);
  CHECK_THROWS_AS(solve_spd(eye, {1.0, 1.0}, 1e-3), SolverError);
  CHECK_THROWS_AS(solve_spd(eye, {1.0, 1.0}, 0.0), SolverError);

  std::vector<Triplet> bad{{0, 0, 1.0}, {1, 1, -1.0}};
  const SparseOperator indef = SparseOperator::from_triplets(2, bad, true);
  try {
    solve_spd(indef, {1.0, 1.0}, 1e-10);
    CHECK(false);
  } catch (const SolverError& err) {
    CHECK(!err.residual_history.empty());
  }
}

TEST_CASE("solve_general matches a dense LU oracle on a nonsymmetric system") {
  const int n = 40;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Triplet> t;
  testsupport::Matrix dense(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = dist(rng) * 0.2;
      if (i == j) v += 4.0;  // diagonally dominant
      t.push_back({i, j, v});
      dense[i][j] = v;
    }
  const SparseOperator a = SparseOperator::from_triplets(n, t, false);
  std::vector<double> rhs(n);
  for (auto& v : rhs) v = dist(rng);
  const SolveResult sol = solve_general(a, rhs, 1e-12);
  const std::vector<double> oracle = testsupport::dense_solve(dense, rhs);
  CHECK(testsupport::max_abs_diff(sol.x, oracle) < 1e-9);
}

TEST_CASE("l2 norms: zero, constant, and the linear-field analytic value") {
  StructuredGrid grid(64, 64);
  const Field zero(grid.node_count(), 0.0);
  CHECK(l2_norm(grid, zero) == 0.0);

  const Field ones(grid.node_count(), 1.0);
  CHECK(l2_norm(grid, ones) == doctest::Approx(1.0).epsilon(1e-13));

  Field lin(grid.node_count());
  for (int n = 0; n < grid.node_count(); ++n) lin[n] = grid.node_position(n)[0];
  const double norm_sq = l2_norm(grid, lin) * l2_norm(grid, lin);
  CHECK(norm_sq == doctest::Approx(1.0 / 3.0).epsilon(1e-3));  // trapezoid-level accuracy

  Field mismatched(grid.node_count() + 1, 0.0);
  CHECK_THROWS_AS(l2_norm(grid, mismatched), SolverError);
}
