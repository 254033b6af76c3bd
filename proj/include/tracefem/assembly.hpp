#pragma once

#include "tracefem/fespace.hpp"
#include "tracefem/geometry.hpp"
#include "tracefem/sparse.hpp"

namespace tracefem {

/// Weights of the volume normal-derivative stabilisations.
struct StabilizationParams {
  double rho = 0.0;        // in A_h
  double rho_tilde = 0.0;  // in b

  /// rho = rho_tilde = c * h^(1 - alpha), alpha in [0, 2], c > 0.
  static StabilizationParams from_scaling(double h, double alpha, double c = 1.0);
};

/// Blocks of the saddle-point system [[A, B^T], [B, 0]] plus the auxiliary
/// matrices used for preconditioning and norms.
struct SaddleSystem {
  SparseMatrix A;        // 3n x 3n, interleaved velocity components
  SparseMatrix B;        // m x 3n
  SparseMatrix Mu;       // velocity mass on the narrow band
  SparseMatrix Mlambda;  // multiplier mass on the narrow band
  SparseMatrix SM;       // multiplier M-norm matrix
  Vector rhs_u;          // load vector; the multiplier block of the rhs is zero
  std::vector<char> velocity_constrained;
  // constrained multiplier rows carry -1 in the (2,2) block and nothing else
  std::vector<char> multiplier_constrained;

  int n_velocity() const { return A.rows(); }
  int n_multiplier() const { return B.rows(); }
  int size() const { return n_velocity() + n_multiplier(); }

  Vector rhs() const;
  /// y = [[A, B^T], [B, -C]] x, C the 0/1 diagonal of constrained multipliers
  void apply(const Vector& x, Vector& y) const;
  SparseMatrix full_matrix() const;
};

/// Surface part of A_h: int_{Gamma_h} tr(E_s(u) E_s(v)) + u.v ds with
/// E_s(u) = 1/2 P_h (grad u + grad u^T) P_h.
SparseMatrix assemble_surface_strain(const TraceSpace& velocity, const SurfaceMesh& surface,
                                     const NormalField& normals);

/// int_{Omega_h} (grad u n_h).(grad v n_h) dx, without the rho factor.
SparseMatrix assemble_normal_stabilization(const TraceSpace& velocity, const NormalField& normals);

/// A_h = surface part + rho * volume part. Requires rho > 0.
SparseMatrix assemble_A(const TraceSpace& velocity, const SurfaceMesh& surface,
                        const NormalField& normals, const StabilizationParams& params);

/// b(u, mu) = (u.n_h, mu)_{Gamma_h} + rho_tilde (n^T grad u n, n.grad mu)_{Omega_h}.
/// Rejects a multiplier degree above the velocity degree.
SparseMatrix assemble_B(const TraceSpace& velocity, const TraceSpace& multiplier,
                        const SurfaceMesh& surface, const NormalField& normals,
                        const StabilizationParams& params);

/// (lambda, mu)_{Gamma_h} + rho (n.grad lambda, n.grad mu)_{Omega_h}.
SparseMatrix assemble_SM(const TraceSpace& multiplier, const SurfaceMesh& surface,
                         const NormalField& normals, double rho);

/// Narrow-band L2 mass matrix, interleaved when components == 3.
SparseMatrix assemble_mass(const TraceSpace& space, int components);

/// Surface L2 mass matrix of a scalar space.
SparseMatrix assemble_surface_mass(const TraceSpace& space, const SurfaceMesh& surface);

/// int_{Gamma_h} g . v_h ds for every vector basis function.
Vector assemble_rhs(const TraceSpace& velocity, const SurfaceMesh& surface, const VectorFunction& g);

/// All blocks, with symmetric elimination of constrained velocity dofs.
SaddleSystem assemble_system(const TraceSpace& velocity, const TraceSpace& multiplier,
                             const SurfaceMesh& surface, const NormalField& normals,
                             const StabilizationParams& params, const VectorFunction& g);

}  // namespace tracefem
