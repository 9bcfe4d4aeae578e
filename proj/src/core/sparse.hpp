#pragma once

#include <span>
#include <vector>

#include "core/types.hpp"

namespace hygrohom {

struct Triplet {
  int row, col;
  double value;
};

// Compressed sparse row operator. Immutable structure after construction;
// the diagonal can be shifted in place (used by the Picard chord updates).
class SparseOperator {
 public:
  SparseOperator() = default;
  static SparseOperator from_triplets(int dim, std::vector<Triplet> entries, bool symmetric);

  int dim() const { return dim_; }
  bool symmetric() const { return symmetric_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  Field multiply(const Field& x) const;

  const Field& diagonal() const { return diag_; }

  // y = this + sum of others (entrywise union). Symmetry flag is the AND of
  // all operands.
  static SparseOperator sum(const std::vector<const SparseOperator*>& ops);

  // Adds delta to the diagonal (dim-sized). Structure must already contain
  // every diagonal entry, which from_triplets guarantees.
  void shift_diagonal(std::span<const double> delta);
  void set_diagonal(std::span<const double> values);

  // Row access for tests and assembly introspection.
  int row_begin(int r) const { return row_ptr_[r]; }
  int row_end(int r) const { return row_ptr_[r + 1]; }
  int col(int k) const { return cols_[k]; }
  double value(int k) const { return vals_[k]; }
  double entry(int r, int c) const;

  std::vector<Triplet> to_triplets() const;

 private:
  int dim_ = 0;
  bool symmetric_ = false;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  std::vector<int> diag_pos_;
  Field diag_;
};

struct SolveResult {
  Field x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

// Jacobi-preconditioned conjugate gradients. Requires op.symmetric().
// rel_tol must lie in (0, 1e-4].
SolveResult solve_spd(const SparseOperator& op, const Field& rhs, double rel_tol,
                      int max_iterations = 0);

// Jacobi-preconditioned BiCGStab for nonsymmetric systems.
SolveResult solve_general(const SparseOperator& op, const Field& rhs, double rel_tol,
                          int max_iterations = 0);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace hygrohom
