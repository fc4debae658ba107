#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace richards {

class SingularMatrixError : public std::runtime_error {
public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Square sparse matrix in compressed row storage. Column indices are
/// strictly increasing within each row; duplicate triplets are summed in
/// insertion order, so assembly is bit-reproducible.
class SparseMatrix {
public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(int n, std::vector<Triplet> entries);
  static SparseMatrix identity(int n);
  static SparseMatrix from_dense(const std::vector<std::vector<double>>& a);

  int size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Value at (row, col); zero if the entry is not stored.
  double coeff(int row, int col) const;

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;

  double norm1() const;     // max column abs sum
  double norm_inf() const;  // max row abs sum
  double max_asymmetry() const;

  SparseMatrix transposed() const;

  /// alpha*A + beta*B with merged sparsity patterns.
  static SparseMatrix linear_combination(double alpha, const SparseMatrix& a,
                                         double beta, const SparseMatrix& b);

private:
  int n_ = 0;
  std::vector<int> row_offsets_ = {0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

/// Reverse Cuthill-McKee ordering of the symmetrized pattern of `a`.
std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a);

/// Sparse LU with partial pivoting of A(:, q), q a reverse Cuthill-McKee
/// preorder (left-looking Gilbert-Peierls). A pivot smaller than
/// n*eps*|A|_1 raises SingularMatrixError.
class LuFactorization {
public:
  static LuFactorization compute(const SparseMatrix& a);

  std::vector<double> solve(std::span<const double> b) const;
  std::vector<double> solve_transpose(std::span<const double> b) const;

  int size() const { return n_; }

private:
  int n_ = 0;
  // L and U stored by columns, row indices in pivot order. L has a unit
  // diagonal stored explicitly as the first entry of each column.
  std::vector<int> l_colptr_, l_rows_;
  std::vector<double> l_vals_;
  std::vector<int> u_colptr_, u_rows_;
  std::vector<double> u_vals_;
  std::vector<double> u_diag_;
  std::vector<int> col_order_;  // q: factored column j is A(:, q[j])
  std::vector<int> pivot_row_;  // pivot step -> original row index
};

/// Lower-bound estimate of the 1-norm condition number |A|_1 * |A^-1|_1.
/// |A^-1|_1 comes from a Hager power iteration on (A^-1, A^-T), block size
/// one, restarted from e/n, at most five sweeps, with the alternating-sign
/// safeguard vector. Exact for diagonal matrices.
double condest_1norm(const LuFactorization& f, const SparseMatrix& a);

}  // namespace richards
