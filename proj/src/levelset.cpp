#include "tracefem/levelset.hpp"

#include <utility>

namespace tracefem {

LevelSet LevelSet::sphere(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw SetupError("sphere radius must be positive");
  LevelSet ls;
  ls.kind_ = Kind::sphere;
  ls.center_ = center;
  ls.radius_ = radius;
  return ls;
}

LevelSet LevelSet::plane(const Vec3& a, double b) {
  if (a.norm() == 0.0) throw SetupError("plane normal must be nonzero");
  LevelSet ls;
  ls.kind_ = Kind::plane;
  ls.plane_normal_ = a;
  ls.plane_offset_ = b;
  return ls;
}

LevelSet LevelSet::tilted_plane() { return plane(Vec3(4.0, 0.0, -1.0), -13.0 / 3.0); }

LevelSet LevelSet::custom(Custom functions) {
  if (!functions.value || !functions.gradient || !functions.closest_point)
    throw SetupError("custom level set needs value, gradient and closest point");
  LevelSet ls;
  ls.kind_ = Kind::custom;
  ls.custom_ = std::move(functions);
  return ls;
}

std::string LevelSet::name() const {
  switch (kind_) {
    case Kind::sphere:
      return "sphere";
    case Kind::plane:
      return "plane";
    default:
      return "custom";
  }
}

double LevelSet::value(const Vec3& x) const {
  switch (kind_) {
    case Kind::sphere:
      return (x - center_).norm() - radius_;
    case Kind::plane:
      return plane_normal_.dot(x) + plane_offset_;
    default:
      return custom_.value(x);
  }
}

Vec3 LevelSet::gradient(const Vec3& x) const {
  switch (kind_) {
    case Kind::sphere:
      return (x - center_).normalized();
    case Kind::plane:
      return plane_normal_;
    default:
      return custom_.gradient(x);
  }
}

Mat3 LevelSet::hessian(const Vec3& x) const {
  switch (kind_) {
    case Kind::sphere: {
      const Vec3 d = x - center_;
      const double r = d.norm();
      const Vec3 n = d / r;
      return (Mat3::Identity() - n * n.transpose()) / r;
    }
    case Kind::plane:
      return Mat3::Zero();
    default:
      if (!custom_.hessian) throw SetupError("custom level set has no hessian");
      return custom_.hessian(x);
  }
}

Vec3 LevelSet::closest_point(const Vec3& x) const {
  switch (kind_) {
    case Kind::sphere:
      return center_ + radius_ * (x - center_).normalized();
    case Kind::plane:
      return x - value(x) * plane_normal_ / plane_normal_.squaredNorm();
    default:
      return custom_.closest_point(x);
  }
}

Vec3 LevelSet::normal(const Vec3& x) const {
  switch (kind_) {
    case Kind::sphere:
      return (x - center_).normalized();
    case Kind::plane:
      return plane_normal_.normalized();
    default:
      return custom_.gradient(closest_point(x)).normalized();
  }
}

Mat3 LevelSet::shape_operator(const Vec3& x) const {
  switch (kind_) {
    case Kind::sphere:
      return hessian(x);
    case Kind::plane:
      return Mat3::Zero();
    default: {
      // Tangential part of grad(grad phi / |grad phi|) at the closest point.
      const Vec3 p = closest_point(x);
      const Vec3 g = custom_.gradient(p);
      const Vec3 n = g.normalized();
      const Mat3 proj = Mat3::Identity() - n * n.transpose();
      return proj * hessian(p) * proj / g.norm();
    }
  }
}

VectorFunction extend(const LevelSet& phi, VectorFunction u) {
  return [phi, u = std::move(u)](const Vec3& x) { return u(phi.closest_point(x)); };
}

ScalarFunction extend(const LevelSet& phi, ScalarFunction u) {
  return [phi, u = std::move(u)](const Vec3& x) { return u(phi.closest_point(x)); };
}

}  // namespace tracefem
