#include "core/grid.hpp"

#include <set>

#include "core/errors.hpp"

namespace hygrohom {

StructuredGrid::StructuredGrid(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 1 || ny < 1) throw ConfigError("grid resolution must be at least 1x1");
  if (lx <= 0 || ly <= 0) throw ConfigError("grid extent must be positive");
  hx_ = lx_ / nx_;
  hy_ = ly_ / ny_;

  boundary_.reserve(2 * (nx_ + ny_));
  for (int i = 0; i < nx_; ++i) {
    boundary_.push_back({node_index(i, 0), node_index(i + 1, 0), hx_});
    boundary_.push_back({node_index(i, ny_), node_index(i + 1, ny_), hx_});
  }
  for (int j = 0; j < ny_; ++j) {
    boundary_.push_back({node_index(0, j), node_index(0, j + 1), hy_});
    boundary_.push_back({node_index(nx_, j), node_index(nx_, j + 1), hy_});
  }

  std::set<int> nodes;
  for (const auto& e : boundary_) {
    nodes.insert(e.a);
    nodes.insert(e.b);
  }
  boundary_nodes_.assign(nodes.begin(), nodes.end());
}

}  // namespace hygrohom
