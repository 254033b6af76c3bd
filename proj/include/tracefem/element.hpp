#pragma once

#include "tracefem/common.hpp"

#include <array>
#include <span>

namespace tracefem {

/// Local node ordering for Lagrange tetrahedra: vertices 0..3, then edge
/// midpoints on (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

constexpr int nodes_per_tet(int degree) { return degree == 1 ? 4 : 10; }

/// Affine tetrahedron: barycentric coordinates and their (constant) gradients.
class TetGeometry {
 public:
  TetGeometry() = default;
  explicit TetGeometry(const std::array<Vec3, 4>& vertices);

  const Vec3& vertex(int i) const { return vertices_[i]; }
  const std::array<Vec3, 4>& vertices() const { return vertices_; }
  double volume() const { return volume_; }

  Eigen::Vector4d barycentric(const Vec3& x) const;
  Vec3 point(const Eigen::Vector4d& bary) const;
  const Vec3& grad_barycentric(int i) const { return grad_bary_[i]; }

  /// Physical coordinates of the local Lagrange nodes.
  Vec3 node(int local) const;

 private:
  std::array<Vec3, 4> vertices_{};
  std::array<Vec3, 4> grad_bary_{};
  Mat3 inverse_jacobian_ = Mat3::Zero();
  double volume_ = 0.0;
};

/// Shape function values at a point given in barycentric coordinates.
void shape_values(int degree, const Eigen::Vector4d& bary, std::span<double> out);

/// Physical gradients of the shape functions.
void shape_gradients(int degree, const TetGeometry& geo, const Eigen::Vector4d& bary,
                     std::span<Vec3> out);

/// Physical Hessians of the shape functions (zero for degree 1).
void shape_hessians(int degree, const TetGeometry& geo, std::span<Mat3> out);

}  // namespace tracefem
