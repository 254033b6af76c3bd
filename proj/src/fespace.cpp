#include "tracefem/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace tracefem {

bool DirichletSpec::any() const {
  return std::any_of(faces.begin(), faces.end(), [](bool f) { return f; });
}

DirichletSpec DirichletSpec::faces_cut_by(const BackgroundMesh& mesh, const LevelSet& phi) {
  DirichletSpec spec;
  const int n = mesh.cells;
  const double tol = 1e-12 * mesh.h;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      bool neg = false, pos = false;
      for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
          std::array<int, 3> c{};
          c[axis] = side * n;
          c[(axis + 1) % 3] = a;
          c[(axis + 2) % 3] = b;
          const double v = phi.value(mesh.vertices[mesh.vertex_index(c[0], c[1], c[2])]);
          (v < -tol ? neg : pos) = true;
        }
      }
      spec.faces[2 * axis + side] = neg && pos;
    }
  }
  return spec;
}

TraceSpace::TraceSpace(const BackgroundMesh& mesh, const ActiveSet& active, int degree,
                       const DirichletSpec& dirichlet)
    : mesh_(&mesh), degree_(degree) {
  if (degree != 1 && degree != 2)
    throw SetupError("trace space degree must be 1 or 2, got " + std::to_string(degree));
  cells_ = active.tets;
  tet_to_cell_ = active.tet_to_active;

  // Nodes live on the doubled lattice: vertices at even, edge midpoints at
  // mixed coordinates, so every node has a unique integer key.
  const std::int64_t m = 2 * static_cast<std::int64_t>(mesh.cells) + 1;
  auto key_of = [m](const std::array<int, 3>& c) -> std::int64_t {
    return c[0] + m * (c[1] + m * static_cast<std::int64_t>(c[2]));
  };
  const int npc = nodes_per_tet(degree);
  std::vector<std::int64_t> cell_keys(cells_.size() * npc);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& t = mesh.tets[cells_[c]];
    std::array<std::array<int, 3>, 4> lat;
    for (int i = 0; i < 4; ++i) {
      lat[i] = mesh.lattice(t[i]);
      for (int& x : lat[i]) x *= 2;
    }
    for (int i = 0; i < npc; ++i) {
      std::array<int, 3> node{};
      if (i < 4) {
        node = lat[i];
      } else {
        const auto& e = kTetEdges[i - 4];
        for (int d = 0; d < 3; ++d) node[d] = (lat[e[0]][d] + lat[e[1]][d]) / 2;
      }
      cell_keys[c * npc + i] = key_of(node);
    }
  }
  std::vector<std::int64_t> keys = cell_keys;
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  dofs_.resize(cell_keys.size());
  for (std::size_t i = 0; i < cell_keys.size(); ++i)
    dofs_[i] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), cell_keys[i]) - keys.begin());

  const double inv = 1.0 / (2.0 * mesh.cells);
  nodes_.resize(keys.size());
  constrained_.assign(keys.size(), 0);
  for (std::size_t d = 0; d < keys.size(); ++d) {
    const std::array<int, 3> c{static_cast<int>(keys[d] % m), static_cast<int>((keys[d] / m) % m),
                               static_cast<int>(keys[d] / (m * m))};
    nodes_[d] = mesh.box.origin + (c[0] * inv) * mesh.box.span[0] + (c[1] * inv) * mesh.box.span[1] +
                (c[2] * inv) * mesh.box.span[2];
    for (int axis = 0; axis < 3; ++axis) {
      if ((dirichlet.faces[2 * axis] && c[axis] == 0) ||
          (dirichlet.faces[2 * axis + 1] && c[axis] == m - 1))
        constrained_[d] = 1;
    }
  }
}

TetGeometry TraceSpace::cell_geometry(std::size_t cell) const {
  return TetGeometry(mesh_->tet_vertices(cells_[cell]));
}

int TraceSpace::n_constrained() const {
  return static_cast<int>(std::count(constrained_.begin(), constrained_.end(), 1));
}

TraceSpace build_space(const BackgroundMesh& mesh, const ActiveSet& active, int degree,
                       const DirichletSpec& dirichlet) {
  return TraceSpace(mesh, active, degree, dirichlet);
}

FEFunction::FEFunction(const TraceSpace& space, int components)
    : FEFunction(space, components, Vector::Zero(static_cast<Eigen::Index>(space.n_dof()) * components)) {}

FEFunction::FEFunction(const TraceSpace& space, int components, Vector coefficients)
    : space_(&space), components_(components), coeff_(std::move(coefficients)) {
  if (components != 1 && components != 3) throw SetupError("FEFunction has 1 or 3 components");
  if (coeff_.size() != static_cast<Eigen::Index>(space.n_dof()) * components)
    throw SetupError("coefficient vector does not match the space");
}

Vec3 FEFunction::value(std::size_t cell, const Vec3& x) const {
  const TetGeometry geo = space_->cell_geometry(cell);
  std::array<double, 10> phi;
  shape_values(space_->degree(), geo.barycentric(x), phi);
  const int* dofs = space_->cell_dofs(cell);
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < space_->nodes_per_cell(); ++a)
    for (int c = 0; c < components_; ++c) v[c] += phi[a] * coeff_[components_ * dofs[a] + c];
  return v;
}

Mat3 FEFunction::gradient(std::size_t cell, const Vec3& x) const {
  const TetGeometry geo = space_->cell_geometry(cell);
  std::array<Vec3, 10> grad;
  shape_gradients(space_->degree(), geo, geo.barycentric(x), grad);
  const int* dofs = space_->cell_dofs(cell);
  Mat3 g = Mat3::Zero();
  for (int a = 0; a < space_->nodes_per_cell(); ++a)
    for (int c = 0; c < components_; ++c)
      g.row(c) += coeff_[components_ * dofs[a] + c] * grad[a].transpose();
  return g;
}

Vec3 FEFunction::value(const Vec3& x) const {
  const auto tet = space_->mesh().locate(x);
  if (!tet || space_->cell_of_tet(*tet) < 0) throw SetupError("point outside the narrow band");
  return value(static_cast<std::size_t>(space_->cell_of_tet(*tet)), x);
}

FEFunction interpolate(const TraceSpace& space, const ScalarFunction& f) {
  FEFunction u(space, 1);
  for (int d = 0; d < space.n_dof(); ++d) u.coefficients()[d] = f(space.node(d));
  return u;
}

FEFunction interpolate(const TraceSpace& space, const VectorFunction& f) {
  FEFunction u(space, 3);
  for (int d = 0; d < space.n_dof(); ++d) u.coefficients().segment<3>(3 * d) = f(space.node(d));
  return u;
}

}  // namespace tracefem
