#include "tracefem/sparse.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace tracefem;

namespace {

Eigen::MatrixXd random_sparse_dense(int rows, int cols, std::mt19937& gen, double fill = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (u(gen) < fill) d(i, j) = n(gen);
  return d;
}

}  // namespace

TEST_CASE("triplets are summed and sorted", "[sparse]") {
  const SparseMatrix m = SparseMatrix::from_triplets(3, 4, {{2, 1, 1.0}, {0, 3, 2.0}, {2, 1, 0.5}, {0, 0, -1.0}});
  CHECK(m.nnz() == 3);
  CHECK(m.coeff(2, 1) == 1.5);
  CHECK(m.coeff(0, 3) == 2.0);
  CHECK(m.coeff(0, 0) == -1.0);
  CHECK(m.coeff(1, 1) == 0.0);
  for (int r = 0; r < m.rows(); ++r)
    for (int k = m.row_ptr()[r] + 1; k < m.row_ptr()[r + 1]; ++k) CHECK(m.col_idx()[k - 1] < m.col_idx()[k]);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), SetupError);
}

TEST_CASE("products agree with dense arithmetic", "[sparse]") {
  std::mt19937 gen(1);
  const Eigen::MatrixXd d = random_sparse_dense(17, 11, gen);
  const SparseMatrix m = SparseMatrix::from_dense(d);
  const Vector x = Vector::Random(11), y = Vector::Random(17);
  Vector out;
  m.multiply(x, out);
  CHECK((out - d * x).norm() < 1e-13);
  m.multiply_transpose(y, out);
  CHECK((out - d.transpose() * y).norm() < 1e-13);
  CHECK((m.transpose().to_dense() - d.transpose()).norm() == 0.0);
  CHECK((Eigen::MatrixXd(m.to_eigen()) - d).norm() == 0.0);
}

TEST_CASE("symmetry check and elimination", "[sparse]") {
  std::mt19937 gen(2);
  const Eigen::MatrixXd r = random_sparse_dense(8, 8, gen, 0.5);
  SparseMatrix s = SparseMatrix::from_dense(r + r.transpose() + 10 * Eigen::MatrixXd::Identity(8, 8));
  CHECK(s.is_symmetric());
  CHECK_FALSE(SparseMatrix::from_dense(r + 20 * Eigen::MatrixXd::Identity(8, 8)).is_symmetric());

  std::vector<char> mask(8, 0);
  mask[2] = mask[5] = 1;
  s.eliminate_symmetric(mask);
  CHECK(s.is_symmetric());
  const Eigen::MatrixXd d = s.to_dense();
  for (int i = 0; i < 8; ++i) {
    CHECK(d(2, i) == (i == 2 ? 1.0 : 0.0));
    CHECK(d(i, 5) == (i == 5 ? 1.0 : 0.0));
  }
  SparseMatrix b = SparseMatrix::from_dense(Eigen::MatrixXd::Ones(3, 8));
  b.zero_columns(mask);
  CHECK(b.to_dense().col(2).norm() == 0.0);
  CHECK(b.to_dense().col(3).norm() > 0.0);
}

TEST_CASE("identity and diagonal", "[sparse]") {
  const SparseMatrix i = SparseMatrix::identity(5);
  CHECK(i.nnz() == 5);
  CHECK((i.diagonal().array() == 1.0).all());
}

TEST_CASE("MatrixMarket output", "[sparse]") {
  const SparseMatrix m = SparseMatrix::from_triplets(2, 3, {{0, 1, 2.5}, {1, 2, -1.0}});
  std::ostringstream os;
  m.write_matrix_market(os);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  std::string line;
  while (std::getline(in, line) && line[0] == '%') {
  }
  int r, c, nnz;
  std::istringstream(line) >> r >> c >> nnz;
  CHECK(r == 2);
  CHECK(c == 3);
  CHECK(nnz == 2);
  int i, j;
  double v;
  in >> i >> j >> v;
  CHECK(i == 1);
  CHECK(j == 2);
  CHECK(v == 2.5);
}
