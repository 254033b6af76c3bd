#include "tracefem/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>

namespace tracefem {

namespace {

struct LanczosResult {
  double max_abs = 0.0;
  bool converged = false;
};

// Lanczos for an operator that is self-adjoint in the inner product given by
// x^T W y, W applied by `weight`. Returns the largest Ritz value in modulus.
LanczosResult lanczos_max_abs(const LinearMap& op, const LinearMap& weight, Eigen::Index n, int steps) {
  steps = int(std::min<Eigen::Index>(steps, n));
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);

  Eigen::MatrixXd V(n, steps), WV(n, steps);
  std::vector<double> alpha, beta;
  Vector Wv, w, Ww;
  weight(v, Wv);
  double nrm = std::sqrt(v.dot(Wv));
  v /= nrm;
  Wv /= nrm;

  for (int j = 0; j < steps; ++j) {
    V.col(j) = v;
    WV.col(j) = Wv;
    op(v, w);
    weight(w, Ww);
    const double a = w.dot(Wv);
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt in the weighted inner product.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coef = WV.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * coef;
    }
    weight(w, Ww);
    const double b = std::sqrt(std::max(w.dot(Ww), 0.0));
    if (j + 1 == steps || b <= 1e-13 * std::abs(a) || b == 0.0) {
      beta.push_back(b);
      break;
    }
    beta.push_back(b);
    v = w / b;
    Wv = Ww / b;
  }

  const int m = int(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Eigen::Index idx;
  es.eigenvalues().cwiseAbs().maxCoeff(&idx);
  LanczosResult res;
  res.max_abs = std::abs(es.eigenvalues()[idx]);
  const double ritz_residual = std::abs(beta.back() * es.eigenvectors()(m - 1, idx));
  res.converged = ritz_residual <= 1e-6 * res.max_abs || m == n;
  return res;
}

void fill_from_spectrum(ConditionEstimate& est, const Vector& ev) {
  est.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  est.lambda_min_abs = ev.cwiseAbs().minCoeff();
  est.lambda_max_abs = ev.cwiseAbs().maxCoeff();
}

}  // namespace

ConditionEstimate estimate_condition(const SparseMatrix& K, const SparseMatrix* Q, int dense_limit,
                                     int lanczos_steps) {
  if (K.rows() != K.cols()) throw SetupError("condition estimate needs a square matrix");
  if (Q && (Q->rows() != K.rows() || Q->cols() != K.cols()))
    throw SetupError("preconditioner size does not match");
  if (!K.is_symmetric(1e-10)) throw SetupError("condition estimate needs a symmetric matrix");
  ConditionEstimate est;

  if (K.rows() <= dense_limit) {
    const Eigen::MatrixXd Kd = K.to_dense();
    if (Q) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Q->to_dense(), Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw SetupError("preconditioner matrix is not positive definite");
      fill_from_spectrum(est, es.eigenvalues());
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Eigen::EigenvaluesOnly);
      fill_from_spectrum(est, es.eigenvalues());
    }
    est.method = "dense";
  } else {
    const Eigen::SparseMatrix<double> Ke = K.to_eigen();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Ke);
    if (lu.info() != Eigen::Success) throw ConvergenceError("matrix is singular");

    LinearMap weight = [](const Vector& x, Vector& y) { y = x; };
    LinearMap q_mul = weight;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> qfac;
    Eigen::SparseMatrix<double> Qe;
    if (Q) {
      Qe = Q->to_eigen();
      qfac.compute(Qe);
      if (qfac.info() != Eigen::Success) throw SetupError("preconditioner matrix is not positive definite");
      weight = [&Qe](const Vector& x, Vector& y) { y = Qe * x; };
      q_mul = weight;
    }
    // Q^{-1} K for the top of the spectrum, K^{-1} Q for the bottom.
    const LinearMap top = [&](const Vector& x, Vector& y) {
      y = Ke * x;
      if (Q) y = qfac.solve(Vector(y));
    };
    const LinearMap bottom = [&](const Vector& x, Vector& y) {
      Vector qx;
      q_mul(x, qx);
      y = lu.solve(qx);
    };
    const LanczosResult hi = lanczos_max_abs(top, weight, K.rows(), lanczos_steps);
    const LanczosResult lo = lanczos_max_abs(bottom, weight, K.rows(), lanczos_steps);
    est.lambda_max_abs = hi.max_abs;
    est.lambda_min_abs = 1.0 / lo.max_abs;
    est.bound_only = !(hi.converged && lo.converged);
    est.method = "lanczos";
  }
  est.cond = est.lambda_max_abs / est.lambda_min_abs;
  return est;
}

ConditionEstimate estimate_condition(const SaddleSystem& system, PrecondMode mode, int dense_limit,
                                     int lanczos_steps) {
  const SparseMatrix K = system.full_matrix();
  if (mode == PrecondMode::none) return estimate_condition(K, nullptr, dense_limit, lanczos_steps);

  const int n = system.n_velocity();
  std::vector<Triplet> t;
  t.reserve(system.Mu.nnz() + system.Mlambda.nnz());
  for (int r = 0; r < n; ++r)
    for (int k = system.Mu.row_ptr()[r]; k < system.Mu.row_ptr()[r + 1]; ++k)
      t.push_back({r, system.Mu.col_idx()[k], system.Mu.values()[k]});
  for (int r = 0; r < system.n_multiplier(); ++r)
    for (int k = system.Mlambda.row_ptr()[r]; k < system.Mlambda.row_ptr()[r + 1]; ++k)
      t.push_back({n + r, n + system.Mlambda.col_idx()[k], system.Mlambda.values()[k]});
  const SparseMatrix Q = SparseMatrix::from_triplets(system.size(), system.size(), std::move(t));
  return estimate_condition(K, &Q, dense_limit, lanczos_steps);
}

SchurSpectrum schur_spectrum(const SaddleSystem& system, int max_size) {
  if (system.n_velocity() > max_size)
    throw SetupError("system too large for a dense Schur complement (" +
                     std::to_string(system.n_velocity()) + " > " + std::to_string(max_size) + ")");
  const Eigen::MatrixXd A = system.A.to_dense();
  const Eigen::MatrixXd B = system.B.to_dense();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw SetupError("A is not positive definite");
  const Eigen::MatrixXd X = llt.solve(B.transpose());
  Eigen::MatrixXd S = B * X;
  for (int i = 0; i < system.n_multiplier() && !system.multiplier_constrained.empty(); ++i)
    if (system.multiplier_constrained[i]) S(i, i) = 1.0;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, system.SM.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SetupError("S_M is not positive definite");
  SchurSpectrum out;
  const Vector& ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  out.min = ev.minCoeff();
  out.max = ev.maxCoeff();
  return out;
}

}  // namespace tracefem
