#pragma once

#include "tracefem/common.hpp"

#include <string>

namespace tracefem {

/// Implicit surface description: the zero level of phi, together with the
/// closest-point map and exact normal/shape operator of the surface.
class LevelSet {
 public:
  enum class Kind { sphere, plane, custom };

  struct Custom {
    ScalarFunction value;
    VectorFunction gradient;
    std::function<Mat3(const Vec3&)> hessian;
    VectorFunction closest_point;
  };

  /// phi(x) = |x - center| - radius.
  static LevelSet sphere(const Vec3& center = Vec3::Zero(), double radius = 1.0);
  /// phi(x) = a.x + b.
  static LevelSet plane(const Vec3& a, double b);
  /// phi(x) = -x3 + 4 x1 - 13/3.
  static LevelSet tilted_plane();
  static LevelSet custom(Custom functions);

  Kind kind() const { return kind_; }
  std::string name() const;

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;

  /// Closest point on the exact surface.
  Vec3 closest_point(const Vec3& x) const;
  /// Unit normal extended constantly along normals (gradient of the signed distance).
  Vec3 normal(const Vec3& x) const;
  /// Gradient of the extended normal: symmetric, annihilates the normal.
  Mat3 shape_operator(const Vec3& x) const;

  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Kind kind_ = Kind::custom;
  Vec3 center_ = Vec3::Zero();
  double radius_ = 1.0;
  Vec3 plane_normal_ = Vec3::UnitZ();
  double plane_offset_ = 0.0;
  Custom custom_;
};

/// Constant extension along normals: u^e(x) = u(p(x)).
VectorFunction extend(const LevelSet& phi, VectorFunction u);
ScalarFunction extend(const LevelSet& phi, ScalarFunction u);

}  // namespace tracefem
