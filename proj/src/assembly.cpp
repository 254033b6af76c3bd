#include "tracefem/assembly.hpp"

#include "tracefem/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace tracefem {

namespace {

struct QuadPoint {
  Vec3 x;
  Eigen::Vector4d bary;
  double w;
};

void surface_points(const TetGeometry& geo, std::span<const SurfaceTriangle> tris,
                    std::vector<QuadPoint>& out) {
  out.clear();
  const TriangleRule& rule = triangle_rule_degree4();
  for (const SurfaceTriangle& t : tris) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec3 x = b[0] * t.points[0] + b[1] * t.points[1] + b[2] * t.points[2];
      out.push_back({x, geo.barycentric(x), 2.0 * t.area * rule.weights[q]});
    }
  }
}

void volume_points(const TetGeometry& geo, const TetRule& rule, std::vector<QuadPoint>& out) {
  out.clear();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::Vector4d& b = rule.points[q];
    out.push_back({geo.point(b), b, 6.0 * geo.volume() * rule.weights[q]});
  }
}

void check_surface(const TraceSpace& space, const SurfaceMesh& surface) {
  if (surface.first.size() != space.n_cells() + 1)
    throw SetupError("surface mesh does not belong to the active set of the space");
}

void scatter(std::vector<Triplet>& t, const Eigen::MatrixXd& local, const int* rows, int row_comp,
             const int* cols, int col_comp) {
  for (Eigen::Index i = 0; i < local.rows(); ++i) {
    const int gi = row_comp * rows[i / row_comp] + int(i % row_comp);
    for (Eigen::Index j = 0; j < local.cols(); ++j) {
      const int gj = col_comp * cols[j / col_comp] + int(j % col_comp);
      t.push_back({gi, gj, local(i, j)});
    }
  }
}

void check_rho(double rho, const char* name) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw SetupError(std::string(name) + " must be positive, got " + std::to_string(rho));
}

}  // namespace

StabilizationParams StabilizationParams::from_scaling(double h, double alpha, double c) {
  if (!(h > 0.0)) throw SetupError("mesh size must be positive");
  if (!(alpha >= 0.0 && alpha <= 2.0)) throw SetupError("alpha must lie in [0, 2]");
  if (!(c > 0.0)) throw SetupError("stabilization constant must be positive");
  const double rho = c * std::pow(h, 1.0 - alpha);
  return {rho, rho};
}

Vector SaddleSystem::rhs() const {
  Vector b = Vector::Zero(size());
  b.head(n_velocity()) = rhs_u;
  return b;
}

void SaddleSystem::apply(const Vector& x, Vector& y) const {
  const int n = n_velocity(), m = n_multiplier();
  y.resize(n + m);
  Vector tmp;
  A.multiply(x.head(n), tmp);
  y.head(n) = tmp;
  B.multiply_transpose(x.tail(m), tmp);
  y.head(n) += tmp;
  B.multiply(x.head(n), tmp);
  y.tail(m) = tmp;
  for (int i = 0; i < m && !multiplier_constrained.empty(); ++i)
    if (multiplier_constrained[i]) y[n + i] = -x[n + i];
}

SparseMatrix SaddleSystem::full_matrix() const {
  const int n = n_velocity();
  std::vector<Triplet> t;
  t.reserve(A.nnz() + 2 * B.nnz());
  for (int r = 0; r < n; ++r)
    for (int k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k)
      t.push_back({r, A.col_idx()[k], A.values()[k]});
  for (int r = 0; r < B.rows(); ++r) {
    for (int k = B.row_ptr()[r]; k < B.row_ptr()[r + 1]; ++k) {
      t.push_back({n + r, B.col_idx()[k], B.values()[k]});
      t.push_back({B.col_idx()[k], n + r, B.values()[k]});
    }
    if (!multiplier_constrained.empty() && multiplier_constrained[r]) t.push_back({n + r, n + r, -1.0});
  }
  return SparseMatrix::from_triplets(size(), size(), std::move(t));
}

SparseMatrix assemble_surface_strain(const TraceSpace& velocity, const SurfaceMesh& surface,
                                     const NormalField& normals) {
  check_surface(velocity, surface);
  const int npc = velocity.nodes_per_cell();
  const int deg = velocity.degree();
  std::vector<Triplet> t;
  t.reserve(velocity.n_cells() * 9 * npc * npc);
  std::vector<QuadPoint> pts;
  std::array<double, 10> phi;
  std::array<Vec3, 10> grad, s;
  Eigen::MatrixXd K(3 * npc, 3 * npc);

  for (std::size_t c = 0; c < velocity.n_cells(); ++c) {
    const TetGeometry geo = velocity.cell_geometry(c);
    const TetNormal tn = normals.on_tet(velocity.cell_tet(c));
    surface_points(geo, surface.in_active(int(c)), pts);
    K.setZero();
    for (const QuadPoint& q : pts) {
      const Mat3 P = tn.projector(q.x);
      shape_values(deg, q.bary, phi);
      shape_gradients(deg, geo, q.bary, grad);
      for (int a = 0; a < npc; ++a) s[a] = P * grad[a];
      for (int a = 0; a < npc; ++a) {
        for (int b = 0; b < npc; ++b) {
          const double ss = s[a].dot(s[b]);
          const double mass = phi[a] * phi[b];
          for (int ci = 0; ci < 3; ++ci)
            for (int di = 0; di < 3; ++di)
              K(3 * a + ci, 3 * b + di) +=
                  q.w * (0.5 * (P(ci, di) * ss + s[b][ci] * s[a][di]) + (ci == di ? mass : 0.0));
        }
      }
    }
    scatter(t, K, velocity.cell_dofs(c), 3, velocity.cell_dofs(c), 3);
  }
  const int n = 3 * velocity.n_dof();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix assemble_normal_stabilization(const TraceSpace& velocity, const NormalField& normals) {
  const int npc = velocity.nodes_per_cell();
  const int deg = velocity.degree();
  const TetRule& rule = tet_rule_for_degree(deg);
  std::vector<Triplet> t;
  t.reserve(velocity.n_cells() * 3 * npc * npc);
  std::vector<QuadPoint> pts;
  std::array<Vec3, 10> grad;
  std::array<double, 10> gn;
  Eigen::MatrixXd K(npc, npc);

  for (std::size_t c = 0; c < velocity.n_cells(); ++c) {
    const TetGeometry geo = velocity.cell_geometry(c);
    const TetNormal tn = normals.on_tet(velocity.cell_tet(c));
    volume_points(geo, rule, pts);
    K.setZero();
    for (const QuadPoint& q : pts) {
      const Vec3 n = tn.normal(q.x);
      shape_gradients(deg, geo, q.bary, grad);
      for (int a = 0; a < npc; ++a) gn[a] = grad[a].dot(n);
      for (int a = 0; a < npc; ++a)
        for (int b = 0; b < npc; ++b) K(a, b) += q.w * gn[a] * gn[b];
    }
    const int* dofs = velocity.cell_dofs(c);
    for (int a = 0; a < npc; ++a)
      for (int b = 0; b < npc; ++b)
        for (int ci = 0; ci < 3; ++ci) t.push_back({3 * dofs[a] + ci, 3 * dofs[b] + ci, K(a, b)});
  }
  const int n = 3 * velocity.n_dof();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix assemble_A(const TraceSpace& velocity, const SurfaceMesh& surface,
                        const NormalField& normals, const StabilizationParams& params) {
  check_rho(params.rho, "rho");
  SparseMatrix a = assemble_surface_strain(velocity, surface, normals);
  const SparseMatrix vol = assemble_normal_stabilization(velocity, normals);
  // The surface pattern holds full 3x3 node blocks for the same node pairs,
  // so it contains the pattern of the volume term.
  for (int r = 0; r < vol.rows(); ++r) {
    const auto first = a.col_idx().begin() + a.row_ptr()[r];
    const auto last = a.col_idx().begin() + a.row_ptr()[r + 1];
    for (int k = vol.row_ptr()[r]; k < vol.row_ptr()[r + 1]; ++k) {
      const auto it = std::lower_bound(first, last, vol.col_idx()[k]);
      a.values()[it - a.col_idx().begin()] += params.rho * vol.values()[k];
    }
  }
  return a;
}

SparseMatrix assemble_B(const TraceSpace& velocity, const TraceSpace& multiplier,
                        const SurfaceMesh& surface, const NormalField& normals,
                        const StabilizationParams& params) {
  if (multiplier.degree() > velocity.degree())
    throw SetupError("multiplier degree exceeds velocity degree");
  if (multiplier.n_cells() != velocity.n_cells())
    throw SetupError("velocity and multiplier spaces live on different active sets");
  check_rho(params.rho_tilde, "rho_tilde");
  check_surface(velocity, surface);
  const int nu = velocity.nodes_per_cell(), nm = multiplier.nodes_per_cell();
  const int ku = velocity.degree(), km = multiplier.degree();
  const TetRule& rule = tet_rule_for_degree(ku);
  std::vector<Triplet> t;
  t.reserve(velocity.n_cells() * 3 * nu * nm);
  std::vector<QuadPoint> pts;
  std::array<double, 10> phi, psi;
  std::array<Vec3, 10> gu, gm;
  Eigen::MatrixXd K(nm, 3 * nu);

  for (std::size_t c = 0; c < velocity.n_cells(); ++c) {
    const TetGeometry geo = velocity.cell_geometry(c);
    const TetNormal tn = normals.on_tet(velocity.cell_tet(c));
    K.setZero();
    surface_points(geo, surface.in_active(int(c)), pts);
    for (const QuadPoint& q : pts) {
      const Vec3 n = tn.normal(q.x);
      shape_values(ku, q.bary, phi);
      shape_values(km, q.bary, psi);
      for (int j = 0; j < nm; ++j)
        for (int a = 0; a < nu; ++a)
          for (int ci = 0; ci < 3; ++ci) K(j, 3 * a + ci) += q.w * phi[a] * n[ci] * psi[j];
    }
    volume_points(geo, rule, pts);
    for (const QuadPoint& q : pts) {
      const Vec3 n = tn.normal(q.x);
      shape_gradients(ku, geo, q.bary, gu);
      shape_gradients(km, geo, q.bary, gm);
      for (int j = 0; j < nm; ++j) {
        const double dpsi = params.rho_tilde * q.w * gm[j].dot(n);
        for (int a = 0; a < nu; ++a) {
          const double ga = gu[a].dot(n) * dpsi;
          for (int ci = 0; ci < 3; ++ci) K(j, 3 * a + ci) += n[ci] * ga;
        }
      }
    }
    scatter(t, K, multiplier.cell_dofs(c), 1, velocity.cell_dofs(c), 3);
  }
  return SparseMatrix::from_triplets(multiplier.n_dof(), 3 * velocity.n_dof(), std::move(t));
}

SparseMatrix assemble_SM(const TraceSpace& multiplier, const SurfaceMesh& surface,
                         const NormalField& normals, double rho) {
  check_rho(rho, "rho");
  check_surface(multiplier, surface);
  const int npc = multiplier.nodes_per_cell();
  const int deg = multiplier.degree();
  const TetRule& rule = tet_rule_for_degree(deg);
  std::vector<Triplet> t;
  t.reserve(multiplier.n_cells() * npc * npc);
  std::vector<QuadPoint> pts;
  std::array<double, 10> psi;
  std::array<Vec3, 10> grad;
  std::array<double, 10> gn;
  Eigen::MatrixXd K(npc, npc);

  for (std::size_t c = 0; c < multiplier.n_cells(); ++c) {
    const TetGeometry geo = multiplier.cell_geometry(c);
    const TetNormal tn = normals.on_tet(multiplier.cell_tet(c));
    K.setZero();
    surface_points(geo, surface.in_active(int(c)), pts);
    for (const QuadPoint& q : pts) {
      shape_values(deg, q.bary, psi);
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < npc; ++j) K(i, j) += q.w * psi[i] * psi[j];
    }
    volume_points(geo, rule, pts);
    for (const QuadPoint& q : pts) {
      const Vec3 n = tn.normal(q.x);
      shape_gradients(deg, geo, q.bary, grad);
      for (int i = 0; i < npc; ++i) gn[i] = grad[i].dot(n);
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < npc; ++j) K(i, j) += rho * q.w * gn[i] * gn[j];
    }
    scatter(t, K, multiplier.cell_dofs(c), 1, multiplier.cell_dofs(c), 1);
  }
  return SparseMatrix::from_triplets(multiplier.n_dof(), multiplier.n_dof(), std::move(t));
}

SparseMatrix assemble_mass(const TraceSpace& space, int components) {
  if (components != 1 && components != 3) throw SetupError("mass matrix has 1 or 3 components");
  const int npc = space.nodes_per_cell();
  const int deg = space.degree();
  const TetRule& rule = tet_rule_for_degree(deg);
  std::vector<Triplet> t;
  t.reserve(space.n_cells() * components * npc * npc);
  std::vector<QuadPoint> pts;
  std::array<double, 10> psi;
  Eigen::MatrixXd K(npc, npc);

  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    const TetGeometry geo = space.cell_geometry(c);
    volume_points(geo, rule, pts);
    K.setZero();
    for (const QuadPoint& q : pts) {
      shape_values(deg, q.bary, psi);
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < npc; ++j) K(i, j) += q.w * psi[i] * psi[j];
    }
    const int* dofs = space.cell_dofs(c);
    for (int i = 0; i < npc; ++i)
      for (int j = 0; j < npc; ++j)
        for (int ci = 0; ci < components; ++ci)
          t.push_back({components * dofs[i] + ci, components * dofs[j] + ci, K(i, j)});
  }
  const int n = components * space.n_dof();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix assemble_surface_mass(const TraceSpace& space, const SurfaceMesh& surface) {
  check_surface(space, surface);
  const int npc = space.nodes_per_cell();
  const int deg = space.degree();
  std::vector<Triplet> t;
  std::vector<QuadPoint> pts;
  std::array<double, 10> psi;
  Eigen::MatrixXd K(npc, npc);
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    const TetGeometry geo = space.cell_geometry(c);
    surface_points(geo, surface.in_active(int(c)), pts);
    K.setZero();
    for (const QuadPoint& q : pts) {
      shape_values(deg, q.bary, psi);
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < npc; ++j) K(i, j) += q.w * psi[i] * psi[j];
    }
    scatter(t, K, space.cell_dofs(c), 1, space.cell_dofs(c), 1);
  }
  return SparseMatrix::from_triplets(space.n_dof(), space.n_dof(), std::move(t));
}

Vector assemble_rhs(const TraceSpace& velocity, const SurfaceMesh& surface, const VectorFunction& g) {
  check_surface(velocity, surface);
  const int npc = velocity.nodes_per_cell();
  const int deg = velocity.degree();
  Vector rhs = Vector::Zero(3 * velocity.n_dof());
  std::vector<QuadPoint> pts;
  std::array<double, 10> phi;
  for (std::size_t c = 0; c < velocity.n_cells(); ++c) {
    const TetGeometry geo = velocity.cell_geometry(c);
    surface_points(geo, surface.in_active(int(c)), pts);
    const int* dofs = velocity.cell_dofs(c);
    for (const QuadPoint& q : pts) {
      const Vec3 gx = g(q.x);
      shape_values(deg, q.bary, phi);
      for (int a = 0; a < npc; ++a) rhs.segment<3>(3 * dofs[a]) += (q.w * phi[a]) * gx;
    }
  }
  return rhs;
}

SaddleSystem assemble_system(const TraceSpace& velocity, const TraceSpace& multiplier,
                             const SurfaceMesh& surface, const NormalField& normals,
                             const StabilizationParams& params, const VectorFunction& g) {
  SaddleSystem sys;
  sys.A = assemble_A(velocity, surface, normals, params);
  sys.B = assemble_B(velocity, multiplier, surface, normals, params);
  sys.SM = assemble_SM(multiplier, surface, normals, params.rho);
  sys.Mu = assemble_mass(velocity, 3);
  sys.Mlambda = assemble_mass(multiplier, 1);
  sys.rhs_u = assemble_rhs(velocity, surface, g);

  sys.velocity_constrained.assign(sys.A.rows(), 0);
  for (int d = 0; d < velocity.n_dof(); ++d)
    if (velocity.constrained(d))
      for (int c = 0; c < 3; ++c) sys.velocity_constrained[3 * d + c] = 1;
  if (velocity.n_constrained() > 0) {
    sys.A.eliminate_symmetric(sys.velocity_constrained);
    sys.Mu.eliminate_symmetric(sys.velocity_constrained);
    sys.B.zero_columns(sys.velocity_constrained);
    for (int i = 0; i < sys.rhs_u.size(); ++i)
      if (sys.velocity_constrained[i]) sys.rhs_u[i] = 0.0;
  }
  // B vanishes on boundary velocities, so boundary multipliers would be undetermined
  sys.multiplier_constrained.assign(sys.B.rows(), 0);
  for (int d = 0; d < multiplier.n_dof(); ++d) sys.multiplier_constrained[d] = multiplier.constrained(d);
  if (multiplier.n_constrained() > 0) {
    sys.SM.eliminate_symmetric(sys.multiplier_constrained);
    sys.Mlambda.eliminate_symmetric(sys.multiplier_constrained);
    sys.B.zero_rows(sys.multiplier_constrained);
  }
  return sys;
}

}  // namespace tracefem
