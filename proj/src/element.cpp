#include "tracefem/element.hpp"

namespace tracefem {

TetGeometry::TetGeometry(const std::array<Vec3, 4>& vertices) : vertices_(vertices) {
  Mat3 jac;
  jac.col(0) = vertices[1] - vertices[0];
  jac.col(1) = vertices[2] - vertices[0];
  jac.col(2) = vertices[3] - vertices[0];
  volume_ = jac.determinant() / 6.0;
  inverse_jacobian_ = jac.inverse();
  // Rows of J^{-1} are the gradients of lambda_1..lambda_3.
  for (int i = 0; i < 3; ++i) grad_bary_[i + 1] = inverse_jacobian_.row(i).transpose();
  grad_bary_[0] = -(grad_bary_[1] + grad_bary_[2] + grad_bary_[3]);
}

Eigen::Vector4d TetGeometry::barycentric(const Vec3& x) const {
  const Vec3 l = inverse_jacobian_ * (x - vertices_[0]);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

Vec3 TetGeometry::point(const Eigen::Vector4d& bary) const {
  return bary[0] * vertices_[0] + bary[1] * vertices_[1] + bary[2] * vertices_[2] +
         bary[3] * vertices_[3];
}

Vec3 TetGeometry::node(int local) const {
  if (local < 4) return vertices_[local];
  const auto& e = kTetEdges[local - 4];
  return 0.5 * (vertices_[e[0]] + vertices_[e[1]]);
}

void shape_values(int degree, const Eigen::Vector4d& b, std::span<double> out) {
  if (degree == 1) {
    for (int i = 0; i < 4; ++i) out[i] = b[i];
    return;
  }
  for (int i = 0; i < 4; ++i) out[i] = b[i] * (2.0 * b[i] - 1.0);
  for (int e = 0; e < 6; ++e) out[4 + e] = 4.0 * b[kTetEdges[e][0]] * b[kTetEdges[e][1]];
}

void shape_gradients(int degree, const TetGeometry& geo, const Eigen::Vector4d& b,
                     std::span<Vec3> out) {
  if (degree == 1) {
    for (int i = 0; i < 4; ++i) out[i] = geo.grad_barycentric(i);
    return;
  }
  for (int i = 0; i < 4; ++i) out[i] = (4.0 * b[i] - 1.0) * geo.grad_barycentric(i);
  for (int e = 0; e < 6; ++e) {
    const int i = kTetEdges[e][0];
    const int j = kTetEdges[e][1];
    out[4 + e] = 4.0 * (b[i] * geo.grad_barycentric(j) + b[j] * geo.grad_barycentric(i));
  }
}

void shape_hessians(int degree, const TetGeometry& geo, std::span<Mat3> out) {
  if (degree == 1) {
    for (int i = 0; i < 4; ++i) out[i].setZero();
    return;
  }
  for (int i = 0; i < 4; ++i) {
    const Vec3& g = geo.grad_barycentric(i);
    out[i] = 4.0 * g * g.transpose();
  }
  for (int e = 0; e < 6; ++e) {
    const Vec3& gi = geo.grad_barycentric(kTetEdges[e][0]);
    const Vec3& gj = geo.grad_barycentric(kTetEdges[e][1]);
    out[4 + e] = 4.0 * (gi * gj.transpose() + gj * gi.transpose());
  }
}

}  // namespace tracefem
