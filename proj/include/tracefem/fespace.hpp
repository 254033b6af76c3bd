#pragma once

#include "tracefem/element.hpp"
#include "tracefem/levelset.hpp"
#include "tracefem/mesh.hpp"

#include <array>
#include <vector>

namespace tracefem {

/// Faces of the bounding box, indexed 2*axis + (0 for the origin side, 1 for the far side).
struct DirichletSpec {
  std::array<bool, 6> faces{};

  bool any() const;
  static DirichletSpec none() { return {}; }
  /// Every box face across which the level set changes sign.
  static DirichletSpec faces_cut_by(const BackgroundMesh& mesh, const LevelSet& phi);
};

/// Continuous degree-k Lagrange space on the active tets. Nodes are numbered
/// lexicographically by their lattice coordinates (z slowest). The space
/// keeps a pointer to the mesh, which must outlive it.
class TraceSpace {
 public:
  TraceSpace(const BackgroundMesh& mesh, const ActiveSet& active, int degree,
             const DirichletSpec& dirichlet = DirichletSpec::none());

  int degree() const { return degree_; }
  int n_dof() const { return static_cast<int>(nodes_.size()); }
  int nodes_per_cell() const { return nodes_per_tet(degree_); }
  std::size_t n_cells() const { return cells_.size(); }

  int cell_tet(std::size_t cell) const { return cells_[cell]; }
  const int* cell_dofs(std::size_t cell) const { return &dofs_[cell * nodes_per_cell()]; }
  TetGeometry cell_geometry(std::size_t cell) const;

  const Vec3& node(int dof) const { return nodes_[dof]; }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  bool constrained(int dof) const { return constrained_[dof] != 0; }
  const std::vector<char>& constrained_mask() const { return constrained_; }
  int n_constrained() const;

  const BackgroundMesh& mesh() const { return *mesh_; }
  /// Active-set position of a background tet, -1 if inactive.
  int cell_of_tet(int tet) const { return tet_to_cell_[tet]; }

 private:
  const BackgroundMesh* mesh_;
  int degree_;
  std::vector<int> cells_;
  std::vector<int> tet_to_cell_;
  std::vector<int> dofs_;
  std::vector<Vec3> nodes_;
  std::vector<char> constrained_;
};

TraceSpace build_space(const BackgroundMesh& mesh, const ActiveSet& active, int degree,
                       const DirichletSpec& dirichlet = DirichletSpec::none());

/// Scalar (components = 1) or interleaved vector (components = 3) finite
/// element function.
class FEFunction {
 public:
  FEFunction(const TraceSpace& space, int components);
  FEFunction(const TraceSpace& space, int components, Vector coefficients);

  const TraceSpace& space() const { return *space_; }
  int components() const { return components_; }
  const Vector& coefficients() const { return coeff_; }
  Vector& coefficients() { return coeff_; }

  /// Evaluation inside a given cell of the space.
  Vec3 value(std::size_t cell, const Vec3& x) const;
  /// Row i holds the gradient of component i.
  Mat3 gradient(std::size_t cell, const Vec3& x) const;

  double scalar_value(std::size_t cell, const Vec3& x) const { return value(cell, x)[0]; }
  Vec3 scalar_gradient(std::size_t cell, const Vec3& x) const { return gradient(cell, x).row(0); }

  /// Evaluation at an arbitrary point of the narrow band.
  Vec3 value(const Vec3& x) const;

 private:
  const TraceSpace* space_;
  int components_;
  Vector coeff_;
};

/// Nodal interpolation.
FEFunction interpolate(const TraceSpace& space, const ScalarFunction& f);
FEFunction interpolate(const TraceSpace& space, const VectorFunction& f);

}  // namespace tracefem
