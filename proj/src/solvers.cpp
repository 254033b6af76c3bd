#include "tracefem/linalg.hpp"

#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace tracefem {

SsorPreconditioner::SsorPreconditioner(const SparseMatrix& M, double omega) : M_(&M), omega_(omega) {
  if (M.rows() != M.cols()) throw SetupError("SSOR needs a square matrix");
  if (!(omega > 0.0 && omega < 2.0)) throw SetupError("SSOR relaxation must lie in (0, 2)");
  diag_pos_.assign(M.rows(), -1);
  for (int r = 0; r < M.rows(); ++r) {
    for (int k = M.row_ptr()[r]; k < M.row_ptr()[r + 1]; ++k)
      if (M.col_idx()[k] == r) diag_pos_[r] = k;
    if (diag_pos_[r] < 0 || !(M.values()[diag_pos_[r]] > 0.0))
      throw SetupError("SSOR needs a positive diagonal (row " + std::to_string(r) + ")");
  }
}

void SsorPreconditioner::apply(const Vector& r, Vector& z) const {
  const auto& rp = M_->row_ptr();
  const auto& ci = M_->col_idx();
  const auto& v = M_->values();
  const int n = M_->rows();
  z.resize(n);
  // (D + w L) y = r
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int k = rp[i]; k < diag_pos_[i]; ++k) s -= omega_ * v[k] * z[ci[k]];
    z[i] = s / v[diag_pos_[i]];
  }
  for (int i = 0; i < n; ++i) z[i] *= v[diag_pos_[i]];
  // (D + w U) z = D y
  for (int i = n - 1; i >= 0; --i) {
    double s = z[i];
    for (int k = diag_pos_[i] + 1; k < rp[i + 1]; ++k) s -= omega_ * v[k] * z[ci[k]];
    z[i] = s / v[diag_pos_[i]];
  }
  z *= omega_ * (2.0 - omega_);
}

PcgResult ssor_pcg(const SparseMatrix& M, const SsorPreconditioner& precond, const Vector& b,
                   double rtol, int maxit) {
  PcgResult res;
  res.x = Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Vector r = b, z, p, q;
  precond.apply(r, z);
  p = z;
  double rz = r.dot(z);
  while (res.iterations < maxit) {
    M.multiply(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) throw ConvergenceError("CG breakdown: matrix not positive definite");
    const double a = rz / pq;
    res.x += a * p;
    r -= a * q;
    ++res.iterations;
    res.relative_residual = r.norm() / bnorm;
    if (res.relative_residual <= rtol) {
      res.converged = true;
      break;
    }
    precond.apply(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

PcgResult ssor_pcg(const SparseMatrix& M, const Vector& b, double rtol, int maxit, double omega) {
  const SsorPreconditioner P(M, omega);
  return ssor_pcg(M, P, b, rtol, maxit);
}

BlockPreconditioner::BlockPreconditioner(const SparseMatrix& QA, const SparseMatrix& QS,
                                         double inner_rtol, int inner_maxit)
    : QA_(&QA), QS_(&QS), ssor_A_(QA), ssor_S_(QS), rtol_(inner_rtol), maxit_(inner_maxit) {}

BlockPreconditioner::BlockPreconditioner(const SaddleSystem& system, double inner_rtol, int inner_maxit)
    : BlockPreconditioner(system.A, system.SM, inner_rtol, inner_maxit) {}

void BlockPreconditioner::apply(const Vector& r, Vector& z) {
  const int n = n_velocity(), m = n_multiplier();
  z.resize(n + m);
  const PcgResult a = ssor_pcg(*QA_, ssor_A_, r.head(n), rtol_, maxit_);
  const PcgResult s = ssor_pcg(*QS_, ssor_S_, r.tail(m), rtol_, maxit_);
  z.head(n) = a.x;
  z.tail(m) = s.x;
  ++applications_;
  total_A_ += a.iterations;
  total_S_ += s.iterations;
  failures_ += int(!a.converged) + int(!s.converged);
}

LinearMap BlockPreconditioner::as_map() {
  return [this](const Vector& r, Vector& z) { apply(r, z); };
}

void BlockPreconditioner::reset_counters() {
  applications_ = 0;
  total_A_ = total_S_ = 0;
  failures_ = 0;
}

double BlockPreconditioner::average_A() const {
  return applications_ ? double(total_A_) / applications_ : 0.0;
}

double BlockPreconditioner::average_S() const {
  return applications_ ? double(total_S_) / applications_ : 0.0;
}

SolverStats minres(const LinearMap& op, const LinearMap& precond, const Vector& b, Vector& x,
                   double rtol, int maxit) {
  const auto start = std::chrono::steady_clock::now();
  SolverStats stats;
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Vector::Zero(n);

  Vector v_prev = Vector::Zero(n), v, z, Az, w_prev = Vector::Zero(n), w = Vector::Zero(n);
  op(x, Az);
  v = b - Az;
  precond(v, z);
  double gamma_sq = z.dot(v);
  if (gamma_sq < 0.0) throw ConvergenceError("MINRES: preconditioner is not positive definite");
  double gamma = std::sqrt(gamma_sq);
  const double gamma1 = gamma;
  double gamma_prev = 1.0;
  double eta = gamma;
  double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;

  stats.residual_history.push_back(1.0);
  stats.relative_residual = gamma1 > 0.0 ? 1.0 : 0.0;
  if (gamma1 == 0.0) {
    stats.converged = true;
    stats.residual_history.back() = 0.0;
  }

  Vector v_next, z_next, w_next;
  while (!stats.converged && stats.iterations < maxit) {
    z /= gamma;
    op(z, Az);
    const double delta = Az.dot(z);
    v_next = Az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
    precond(v_next, z_next);
    const double gn_sq = z_next.dot(v_next);
    if (gn_sq < -1e-14 * gamma1 * gamma1)
      throw ConvergenceError("MINRES: preconditioner is not positive definite");
    const double gamma_next = std::sqrt(std::max(gn_sq, 0.0));

    const double a0 = c * delta - c_prev * s * gamma;
    const double a1 = std::hypot(a0, gamma_next);
    const double a2 = s * delta + c_prev * c * gamma;
    const double a3 = s_prev * gamma;
    if (a1 == 0.0) throw ConvergenceError("MINRES breakdown");
    const double c_next = a0 / a1, s_next = gamma_next / a1;

    w_next = (z - a3 * w_prev - a2 * w) / a1;
    x += (c_next * eta) * w_next;
    eta = -s_next * eta;

    ++stats.iterations;
    stats.relative_residual = std::abs(eta) / gamma1;
    stats.residual_history.push_back(stats.relative_residual);
    if (stats.relative_residual <= rtol || gamma_next == 0.0) {
      stats.converged = true;
      break;
    }

    v_prev.swap(v);
    v.swap(v_next);
    z.swap(z_next);
    w_prev.swap(w);
    w.swap(w_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    c_prev = c;
    c = c_next;
    s_prev = s;
    s = s_next;
  }
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

SaddleSolution minres(const SaddleSystem& system, BlockPreconditioner& precond, double rtol, int maxit) {
  if (precond.n_velocity() != system.n_velocity() || precond.n_multiplier() != system.n_multiplier())
    throw SetupError("preconditioner does not match the system");
  precond.reset_counters();
  const LinearMap op = [&system](const Vector& x, Vector& y) { system.apply(x, y); };
  Vector x = Vector::Zero(system.size());
  SaddleSolution sol;
  sol.stats = minres(op, precond.as_map(), system.rhs(), x, rtol, maxit);
  sol.stats.inner_A = precond.average_A();
  sol.stats.inner_S = precond.average_S();
  sol.u = x.head(system.n_velocity());
  sol.lambda = x.tail(system.n_multiplier());
  return sol;
}

SaddleSolution direct_solve(const SaddleSystem& system) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::SparseMatrix<double> K = system.full_matrix().to_eigen();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw ConvergenceError("sparse LU factorization failed");
  const Vector b = system.rhs();
  const Vector x = lu.solve(b);
  SaddleSolution sol;
  sol.u = x.head(system.n_velocity());
  sol.lambda = x.tail(system.n_multiplier());
  sol.stats.converged = true;
  const double bn = b.norm();
  sol.stats.relative_residual = bn > 0.0 ? (K * x - b).norm() / bn : 0.0;
  sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

void write_residual_history(std::ostream& os, const SolverStats& stats) {
  os << "iteration residual\n";
  char buf[64];
  for (std::size_t i = 0; i < stats.residual_history.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.5e\n", i, stats.residual_history[i]);
    os << buf;
  }
}

}  // namespace tracefem
