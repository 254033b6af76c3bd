#pragma once

#include "tracefem/common.hpp"
#include "tracefem/levelset.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace tracefem {

/// Parallelepiped origin + e1, e2, e3. A level-l mesh has
/// root_cells * 2^l sub-cells along each spanning vector.
struct BoundingBox {
  Vec3 origin = Vec3::Zero();
  std::array<Vec3, 3> span{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  int root_cells = 1;

  /// [-5/3, 5/3]^3 with n_l = 2^(l+1).
  static BoundingBox sphere_case();
  /// Sheared box whose faces cut by the tilted plane are perpendicular to it,
  /// n_l = 2^(l+2).
  static BoundingBox plane_case();

  /// Signed det(e1, e2, e3).
  double signed_volume() const;
  int cells_at_level(int level) const;
};

struct BackgroundMesh {
  BoundingBox box;
  int level = 0;
  int cells = 0;   // sub-cells per spanning direction
  double h = 0.0;  // sub-cell extent along the first coordinate axis
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;

  int vertex_index(int i, int j, int k) const { return i + (cells + 1) * (j + (cells + 1) * k); }
  std::array<int, 3> lattice(int vertex) const;
  std::array<Vec3, 4> tet_vertices(int tet) const;
  double tet_volume(int tet) const;

  /// Tetrahedron containing x, or nullopt outside the box.
  std::optional<int> locate(const Vec3& x) const;
};

/// Structured mesh: every sub-cell split into the 6 Kuhn tetrahedra along its
/// main diagonal, all positively oriented.
BackgroundMesh build_mesh(const BoundingBox& box, int level);

/// Tetrahedra cut by the zero level of the piecewise-linear level-set interpolant.
struct ActiveSet {
  std::vector<int> tets;            // sorted background tet indices
  std::vector<int> tet_to_active;   // -1 for inactive tets
  std::vector<double> vertex_phi;   // level-set values with near-zeros pushed to +tol
  double zero_tolerance = 0.0;

  std::size_t size() const { return tets.size(); }
  bool contains(int tet) const { return tet_to_active[tet] >= 0; }
};

/// Collects the tets on which the perturbed vertex signs are not all equal.
/// Throws SetupError("surface not found") when none is cut.
ActiveSet select_active(const BackgroundMesh& mesh, const LevelSet& phi);

/// Legacy ASCII VTK unstructured grid; all tets when `subset` is empty.
void write_vtk(std::ostream& os, const BackgroundMesh& mesh, const std::vector<int>& subset = {});

}  // namespace tracefem
