#pragma once

#include <array>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace hygrohom {

// Uniform quadrilateral grid on [0, Lx] x [0, Ly] with bilinear (Q1) nodes.
// Node indexing is row-major: node(i, j) = j * (nx + 1) + i.
class StructuredGrid {
 public:
  StructuredGrid(int nx, int ny, double lx = 1.0, double ly = 1.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }

  int node_count() const { return (nx_ + 1) * (ny_ + 1); }
  int element_count() const { return nx_ * ny_; }

  int node_index(int i, int j) const { return j * (nx_ + 1) + i; }
  std::array<double, 2> node_position(int n) const {
    const int i = n % (nx_ + 1), j = n / (nx_ + 1);
    return {i * hx_, j * hy_};
  }

  // Element local nodes ordered counterclockwise from the lower-left corner.
  std::array<int, 4> element_nodes(int e) const {
    const int i = e % nx_, j = e / nx_;
    const int n0 = node_index(i, j);
    return {n0, n0 + 1, n0 + nx_ + 2, n0 + nx_ + 1};
  }

  std::array<double, 2> element_centroid(int e) const {
    const int i = e % nx_, j = e / nx_;
    return {(i + 0.5) * hx_, (j + 0.5) * hy_};
  }

  double element_area() const { return hx_ * hy_; }

  // Boundary edges as node pairs with edge length; traversed bottom, top,
  // left, right.
  struct BoundaryEdge {
    int a, b;
    double length;
  };
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }

  // Mean of the four corner values; for Q1 fields this equals the centroid
  // value.
  double element_value(std::span<const double> nodal, int e) const {
    const auto n = element_nodes(e);
    return 0.25 * (nodal[n[0]] + nodal[n[1]] + nodal[n[2]] + nodal[n[3]]);
  }

  // Gradient of the Q1 interpolant at the element centroid.
  std::array<double, 2> element_gradient(std::span<const double> nodal, int e) const {
    const auto n = element_nodes(e);
    const double gx = 0.5 * ((nodal[n[1]] + nodal[n[2]]) - (nodal[n[0]] + nodal[n[3]])) / hx_;
    const double gy = 0.5 * ((nodal[n[3]] + nodal[n[2]]) - (nodal[n[0]] + nodal[n[1]])) / hy_;
    return {gx, gy};
  }

 private:
  int nx_, ny_;
  double lx_, ly_, hx_, hy_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<int> boundary_nodes_;
};

}  // namespace hygrohom
