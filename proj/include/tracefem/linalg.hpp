#pragma once

#include "tracefem/assembly.hpp"
#include "tracefem/sparse.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tracefem {

/// y = Op(x)
using LinearMap = std::function<void(const Vector&, Vector&)>;

/// Symmetric SOR sweep (forward then backward) as a preconditioner for CG.
class SsorPreconditioner {
 public:
  explicit SsorPreconditioner(const SparseMatrix& M, double omega = 1.0);
  void apply(const Vector& r, Vector& z) const;

 private:
  const SparseMatrix* M_;
  double omega_;
  std::vector<int> diag_pos_;
};

struct PcgResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

/// CG with SSOR preconditioning from a zero initial guess. Stops when the
/// Euclidean residual is reduced by rtol.
PcgResult ssor_pcg(const SparseMatrix& M, const SsorPreconditioner& precond, const Vector& b,
                   double rtol, int maxit);
PcgResult ssor_pcg(const SparseMatrix& M, const Vector& b, double rtol, int maxit, double omega = 1.0);

/// Q = diag(Q_A, Q_S), each block applied as an inexact SSOR-PCG solve.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const SparseMatrix& QA, const SparseMatrix& QS, double inner_rtol = 1e-4,
                      int inner_maxit = 20000);
  /// Uses A and S_M of the system.
  explicit BlockPreconditioner(const SaddleSystem& system, double inner_rtol = 1e-4,
                               int inner_maxit = 20000);

  void apply(const Vector& r, Vector& z);
  LinearMap as_map();

  void reset_counters();
  int applications() const { return applications_; }
  double average_A() const;
  double average_S() const;
  /// Inner solves that hit inner_maxit.
  int inner_failures() const { return failures_; }

  int n_velocity() const { return QA_->rows(); }
  int n_multiplier() const { return QS_->rows(); }

 private:
  const SparseMatrix* QA_;
  const SparseMatrix* QS_;
  SsorPreconditioner ssor_A_;
  SsorPreconditioner ssor_S_;
  double rtol_;
  int maxit_;
  int applications_ = 0;
  long total_A_ = 0;
  long total_S_ = 0;
  int failures_ = 0;
};

struct SolverStats {
  int iterations = 0;
  bool converged = false;
  double relative_residual = 1.0;
  /// Preconditioned residual norm relative to the initial one, starting at 1.
  std::vector<double> residual_history;
  double seconds = 0.0;
  double inner_A = 0.0;  // average inner iterations per application
  double inner_S = 0.0;
};

/// Preconditioned MINRES for a symmetric operator and an SPD preconditioner
/// action, starting from x (usually zero). Stops when the preconditioned
/// residual norm has dropped by rtol.
SolverStats minres(const LinearMap& op, const LinearMap& precond, const Vector& b, Vector& x,
                   double rtol, int maxit);

struct SaddleSolution {
  Vector u;       // interleaved velocity coefficients
  Vector lambda;  // multiplier coefficients
  SolverStats stats;
};

/// Zero initial guess; counters of the preconditioner are reset first.
SaddleSolution minres(const SaddleSystem& system, BlockPreconditioner& precond, double rtol = 1e-6,
                      int maxit = 2000);

/// Sparse direct solve of the full saddle system, for diagnostics.
SaddleSolution direct_solve(const SaddleSystem& system);

void write_residual_history(std::ostream& os, const SolverStats& stats);

enum class PrecondMode { none, mass_block };

struct ConditionEstimate {
  double lambda_min_abs = 0.0;
  double lambda_max_abs = 0.0;
  double cond = 0.0;
  /// Lanczos did not converge: the numbers bound the true extremes from inside.
  bool bound_only = false;
  std::string method;
  std::vector<double> eigenvalues;  // full spectrum for the dense route
};

/// Spectral condition number of K or of Q^{-1} K (Q SPD). Dense
/// eigensolve up to dense_limit unknowns, Lanczos above.
ConditionEstimate estimate_condition(const SparseMatrix& K, const SparseMatrix* Q = nullptr,
                                     int dense_limit = 3500, int lanczos_steps = 200);

/// cond of the saddle matrix, unpreconditioned or with Q = diag(M_u, M_lambda).
ConditionEstimate estimate_condition(const SaddleSystem& system, PrecondMode mode,
                                     int dense_limit = 3500, int lanczos_steps = 200);

struct SchurSpectrum {
  double min = 0.0;
  double max = 0.0;
  std::vector<double> eigenvalues;
};

/// Generalized eigenvalues of S = B A^{-1} B^T against S_M. Dense; refuses
/// systems with more than max_size velocity unknowns.
SchurSpectrum schur_spectrum(const SaddleSystem& system, int max_size = 6000);

}  // namespace tracefem
