#pragma once

#include "tracefem/element.hpp"
#include "tracefem/levelset.hpp"
#include "tracefem/mesh.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace tracefem {

struct SurfaceTriangle {
  std::array<Vec3, 3> points;
  int tet = -1;     // background tet index
  int active = -1;  // position in the active set
  double area = 0.0;
  Vec3 normal = Vec3::Zero();  // oriented along grad(I_1 phi)
};

/// Piecewise planar Gamma_h = {I_1 phi = 0}. Triangles are grouped by active
/// tet: those of active tet a are [first[a], first[a+1]).
struct SurfaceMesh {
  std::vector<SurfaceTriangle> triangles;
  std::vector<int> first;
  double total_area = 0.0;

  std::span<const SurfaceTriangle> in_active(int a) const {
    return {triangles.data() + first[a], static_cast<std::size_t>(first[a + 1] - first[a])};
  }
};

/// Marching tetrahedra on the linear interpolant of the (perturbed) vertex values.
SurfaceMesh extract_surface(const BackgroundMesh& mesh, const ActiveSet& active);

/// Triangles cut from a single tet with the given vertex values; exposed for testing.
std::vector<std::array<Vec3, 3>> cut_tetrahedron(const std::array<Vec3, 4>& vertices,
                                                 const std::array<double, 4>& values,
                                                 const std::array<int, 4>& vertex_ids);

enum class NormalMode { exact, interpolated };

/// Normal field on one tetrahedron.
class TetNormal {
 public:
  TetNormal(NormalMode mode, const LevelSet* phi, const TetGeometry& geo);

  Vec3 normal(const Vec3& x) const;
  Mat3 projector(const Vec3& x) const;
  Mat3 shape_operator(const Vec3& x) const;
  /// Gradient of the quadratic interpolant (interpolated mode only).
  Vec3 interpolant_gradient(const Vec3& x) const;

 private:
  NormalMode mode_;
  const LevelSet* phi_;
  TetGeometry geo_;
  std::array<double, 10> coeff_{};
};

/// n_h = grad(I_2 phi)/|grad(I_2 phi)| (interpolated) or the exact extended normal.
class NormalField {
 public:
  NormalField(const BackgroundMesh& mesh, const LevelSet& phi, NormalMode mode);

  NormalMode mode() const { return mode_; }
  TetNormal on_tet(int tet) const;

  /// Point evaluation; locates the containing tet for interpolated mode.
  Vec3 normal(const Vec3& x) const;
  Mat3 projector(const Vec3& x) const;
  Mat3 shape_operator(const Vec3& x) const;

 private:
  int containing_tet(const Vec3& x) const;

  const BackgroundMesh* mesh_;
  const LevelSet* phi_;
  NormalMode mode_;
};

/// H = grad n. Exact mode uses the analytic level set; interpolated mode the
/// tangential part of the Jacobian of n_h.
Mat3 shape_operator(const NormalField& normals, const Vec3& x);

/// Legacy ASCII VTK polydata. Optional per-point vector data sampled at the
/// triangle vertices (3 vectors per triangle).
void write_vtk(std::ostream& os, const SurfaceMesh& surface,
               const std::vector<Vec3>& point_vectors = {}, const std::string& field_name = "u_h");

}  // namespace tracefem
