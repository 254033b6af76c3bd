#include "tracefem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace tracefem {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  while (i < triplets.size()) {
    const Triplet& t = triplets[i];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw SetupError("triplet index out of range");
    double sum = 0.0;
    std::size_t j = i;
    for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j)
      sum += triplets[j].value;
    m.col_idx_.push_back(t.col);
    m.values_.push_back(sum);
    ++m.row_ptr_[t.row + 1];
    i = j;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense, double drop) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < dense.rows(); ++i)
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      if (std::abs(dense(i, j)) > drop) t.push_back({int(i), int(j), dense(i, j)});
  return from_triplets(int(dense.rows()), int(dense.cols()), std::move(t));
}

double SparseMatrix::coeff(int row, int col) const {
  const auto begin = col_idx_.begin() + row_ptr_[row];
  const auto end = col_idx_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  return (it != end && *it == col) ? values_[it - col_idx_.begin()] : 0.0;
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_));
  for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
  y.resize(rows_);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
}

void SparseMatrix::multiply_transpose(const Vector& x, Vector& y) const {
  y.setZero(cols_);
  for (int r = 0; r < rows_; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * xr;
  }
}

Vector SparseMatrix::operator*(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_idx_[k], r, values_[k]});
  return from_triplets(cols_, rows_, std::move(t));
}

double SparseMatrix::asymmetry() const {
  if (rows_ != cols_) return INFINITY;
  double scale = 0.0, diff = 0.0;
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      scale = std::max(scale, std::abs(values_[k]));
      diff = std::max(diff, std::abs(values_[k] - coeff(col_idx_[k], r)));
    }
  }
  return scale > 0.0 ? diff / scale : 0.0;
}

void SparseMatrix::eliminate_symmetric(const std::vector<char>& mask) {
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int c = col_idx_[k];
      if (mask[r] || mask[c]) values_[k] = (r == c) ? 1.0 : 0.0;
    }
  }
}

void SparseMatrix::zero_columns(const std::vector<char>& mask) {
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (mask[col_idx_[k]]) values_[k] = 0.0;
}

void SparseMatrix::zero_rows(const std::vector<char>& mask) {
  for (int r = 0; r < rows_; ++r)
    if (mask[r])
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) values_[k] = 0.0;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.emplace_back(r, col_idx_[k], values_[k]);
  Eigen::SparseMatrix<double> m(rows_, cols_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
  return d;
}

void SparseMatrix::write_matrix_market(std::ostream& os) const {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
  os.precision(17);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      os << r + 1 << ' ' << col_idx_[k] + 1 << ' ' << values_[k] << '\n';
}

}  // namespace tracefem
