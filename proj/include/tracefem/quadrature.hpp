#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tracefem {

/// Quadrature on a reference simplex. Points are stored in barycentric
/// coordinates; weights sum to the measure of the reference element
/// (1/2 for the triangle, 1/6 for the tetrahedron).
template <int NBary>
struct QuadratureRule {
  using Point = Eigen::Matrix<double, NBary, 1>;

  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

using TriangleRule = QuadratureRule<3>;
using TetRule = QuadratureRule<4>;

/// 6-point rule, exact for polynomials of degree 4.
const TriangleRule& triangle_rule_degree4();

/// 4-point rule, exact for polynomials of degree 2.
const TetRule& tet_rule_degree2();

/// 14-point rule with positive weights, exact for polynomials of degree 5.
const TetRule& tet_rule_degree5();

/// Volume rule used for a trace space of the given polynomial degree.
const TetRule& tet_rule_for_degree(int fe_degree);

}  // namespace tracefem
