#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "core/sparse.hpp"

namespace testsupport {

using Matrix = std::vector<std::vector<double>>;

inline Matrix densify(const hygrohom::SparseOperator& op) {
  Matrix m(op.dim(), std::vector<double>(op.dim(), 0.0));
  for (int r = 0; r < op.dim(); ++r)
    for (int k = op.row_begin(r); k < op.row_end(r); ++k) m[r][op.col(k)] += op.value(k);
  return m;
}

// Plain Gaussian elimination with partial pivoting; the independent linear
// solve used by the oracles.
inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

inline std::vector<double> dense_multiply(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += a[r][c] * x[c];
  return y;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace testsupport
