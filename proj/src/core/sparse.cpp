#include "core/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace hygrohom {

SparseOperator SparseOperator::from_triplets(int dim, std::vector<Triplet> entries,
                                             bool symmetric) {
  SparseOperator op;
  op.dim_ = dim;
  op.symmetric_ = symmetric;

  // Make sure the diagonal is structurally present.
  entries.reserve(entries.size() + dim);
  for (int i = 0; i < dim; ++i) entries.push_back({i, i, 0.0});

  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  op.row_ptr_.assign(dim + 1, 0);
  op.cols_.reserve(entries.size());
  op.vals_.reserve(entries.size());

  std::size_t k = 0;
  for (int r = 0; r < dim; ++r) {
    op.row_ptr_[r] = static_cast<int>(op.cols_.size());
    while (k < entries.size() && entries[k].row == r) {
      const int c = entries[k].col;
      double v = 0.0;
      while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
        v += entries[k].value;
        ++k;
      }
      op.cols_.push_back(c);
      op.vals_.push_back(v);
    }
  }
  op.row_ptr_[dim] = static_cast<int>(op.cols_.size());

  op.diag_pos_.assign(dim, -1);
  op.diag_.assign(dim, 0.0);
  for (int r = 0; r < dim; ++r) {
    for (int p = op.row_ptr_[r]; p < op.row_ptr_[r + 1]; ++p) {
      if (op.cols_[p] == r) {
        op.diag_pos_[r] = p;
        op.diag_[r] = op.vals_[p];
      }
    }
  }
  return op;
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += vals_[p] * x[cols_[p]];
    y[r] = s;
  }
}

Field SparseOperator::multiply(const Field& x) const {
  Field y(dim_, 0.0);
  multiply(x, y);
  return y;
}

SparseOperator SparseOperator::sum(const std::vector<const SparseOperator*>& ops) {
  if (ops.empty()) return {};
  const int dim = ops.front()->dim();
  bool symmetric = true;
  std::vector<Triplet> entries;
  for (const auto* op : ops) {
    if (op->dim() != dim) throw SolverError("operator dimension mismatch in sum");
    symmetric = symmetric && op->symmetric();
    auto t = op->to_triplets();
    entries.insert(entries.end(), t.begin(), t.end());
  }
  return from_triplets(dim, std::move(entries), symmetric);
}

void SparseOperator::shift_diagonal(std::span<const double> delta) {
  for (int r = 0; r < dim_; ++r) {
    vals_[diag_pos_[r]] += delta[r];
    diag_[r] = vals_[diag_pos_[r]];
  }
}

void SparseOperator::set_diagonal(std::span<const double> values) {
  for (int r = 0; r < dim_; ++r) {
    vals_[diag_pos_[r]] = values[r];
    diag_[r] = values[r];
  }
}

double SparseOperator::entry(int r, int c) const {
  for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
    if (cols_[p] == c) return vals_[p];
  return 0.0;
}

std::vector<Triplet> SparseOperator::to_triplets() const {
  std::vector<Triplet> t;
  t.reserve(vals_.size());
  for (int r = 0; r < dim_; ++r)
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({r, cols_[p], vals_[p]});
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

void check_rel_tol(double rel_tol) {
  if (!(rel_tol > 0.0) || rel_tol > 1e-4)
    throw SolverError("solver rel_tol must lie in (0, 1e-4]");
}

Field jacobi_inverse(const SparseOperator& op) {
  Field inv(op.dim(), 1.0);
  const Field& d = op.diagonal();
  for (int i = 0; i < op.dim(); ++i) inv[i] = (d[i] != 0.0) ? 1.0 / d[i] : 1.0;
  return inv;
}

}  // namespace

SolveResult solve_spd(const SparseOperator& op, const Field& rhs, double rel_tol,
                      int max_iterations) {
  check_rel_tol(rel_tol);
  if (!op.symmetric()) throw SolverError("solve_spd requires a symmetric operator");
  const int n = op.dim();
  if (max_iterations <= 0) max_iterations = std::max(2000, 20 * n);

  SolveResult res;
  res.x.assign(n, 0.0);
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }

  const Field minv = jacobi_inverse(op);
  Field r = rhs;  // x0 = 0
  Field z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
  p = z;
  double rz = dot(r, z);

  for (int it = 0; it < max_iterations; ++it) {
    op.multiply(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) {
      res.residual_history.push_back(norm2(r) / rhs_norm);
      throw SolverError("solve_spd: operator not positive definite", res.residual_history);
    }
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rel = norm2(r) / rhs_norm;
    res.residual_history.push_back(rel);
    res.iterations = it + 1;
    if (rel <= rel_tol) {
      res.relative_residual = rel;
      res.converged = true;
      return res;
    }
    for (int i = 0; i < n; ++i) z[i] = minv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.relative_residual = res.residual_history.back();
  throw SolverError("solve_spd: no convergence within max iterations",
                    res.residual_history);
}

SolveResult solve_general(const SparseOperator& op, const Field& rhs, double rel_tol,
                          int max_iterations) {
  check_rel_tol(rel_tol);
  const int n = op.dim();
  if (max_iterations <= 0) max_iterations = std::max(4000, 40 * n);

  SolveResult res;
  res.x.assign(n, 0.0);
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }

  const Field minv = jacobi_inverse(op);
  Field r = rhs;
  Field r0 = r;
  Field p(n, 0.0), v(n, 0.0), s(n), t(n), y(n), z(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  for (int it = 0; it < max_iterations; ++it) {
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0) break;
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_new;
    for (int i = 0; i < n; ++i) y[i] = minv[i] * p[i];
    op.multiply(y, v);
    const double r0v = dot(r0, v);
    if (r0v == 0.0) break;
    alpha = rho / r0v;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    double rel = norm2(s) / rhs_norm;
    if (rel <= rel_tol) {
      for (int i = 0; i < n; ++i) res.x[i] += alpha * y[i];
      res.residual_history.push_back(rel);
      res.iterations = it + 1;
      res.relative_residual = rel;
      res.converged = true;
      return res;
    }
    for (int i = 0; i < n; ++i) z[i] = minv[i] * s[i];
    op.multiply(z, t);
    const double tt = dot(t, t);
    if (tt == 0.0) break;
    omega = dot(t, s) / tt;
    for (int i = 0; i < n; ++i) {
      res.x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    rel = norm2(r) / rhs_norm;
    res.residual_history.push_back(rel);
    res.iterations = it + 1;
    if (rel <= rel_tol) {
      res.relative_residual = rel;
      res.converged = true;
      return res;
    }
    if (omega == 0.0) break;
  }
  if (res.residual_history.empty()) res.residual_history.push_back(1.0);
  res.relative_residual = res.residual_history.back();
  throw SolverError("solve_general: no convergence within max iterations",
                    res.residual_history);
}

}  // namespace hygrohom
