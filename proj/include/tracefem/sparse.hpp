#pragma once

#include "tracefem/common.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

namespace tracefem {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row matrix with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Duplicates are summed in insertion order, so equal inputs give
  /// bit-identical matrices.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense, double drop = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double coeff(int row, int col) const;
  Vector diagonal() const;

  void multiply(const Vector& x, Vector& y) const;
  void multiply_transpose(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const;

  SparseMatrix transpose() const;
  /// max |a_ij - a_ji| relative to max |a_ij|.
  double asymmetry() const;
  bool is_symmetric(double rel_tol = 1e-12) const { return asymmetry() <= rel_tol; }

  /// Symmetric elimination: zero the given rows and columns, unit diagonal.
  void eliminate_symmetric(const std::vector<char>& mask);
  /// Zero the given columns.
  void zero_columns(const std::vector<char>& mask);
  void zero_rows(const std::vector<char>& mask);

  Eigen::SparseMatrix<double> to_eigen() const;
  Eigen::MatrixXd to_dense() const;

  /// MatrixMarket coordinate real general.
  void write_matrix_market(std::ostream& os) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

}  // namespace tracefem
