#include "tracefem/quadrature.hpp"

#include "tracefem/common.hpp"

namespace tracefem {

namespace {

void add_s3(TriangleRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.emplace_back(a, a, b);
  rule.points.emplace_back(a, b, a);
  rule.points.emplace_back(b, a, a);
  for (int i = 0; i < 3; ++i) rule.weights.push_back(w);
}

// Orbit (a, a, a, 1-3a) of the tetrahedral symmetry group.
void add_s31(TetRule& rule, double a, double w) {
  const double b = 1.0 - 3.0 * a;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d p = Eigen::Vector4d::Constant(a);
    p[i] = b;
    rule.points.push_back(p);
    rule.weights.push_back(w);
  }
}

// Orbit (a, a, 1/2-a, 1/2-a).
void add_s22(TetRule& rule, double a, double w) {
  const double b = 0.5 - a;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      Eigen::Vector4d p = Eigen::Vector4d::Constant(b);
      p[i] = a;
      p[j] = a;
      rule.points.push_back(p);
      rule.weights.push_back(w);
    }
  }
}

TriangleRule make_triangle4() {
  TriangleRule rule;
  rule.degree = 4;
  // Dunavant, weights normalised to area 1 and scaled by 1/2 below.
  add_s3(rule, 0.445948490915965, 0.223381589678011);
  add_s3(rule, 0.091576213509771, 0.109951743655322);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  for (double& w : rule.weights) w *= 0.5 / sum;
  return rule;
}

TetRule make_tet2() {
  TetRule rule;
  rule.degree = 2;
  add_s31(rule, 0.1381966011250105, 1.0 / 24.0);
  return rule;
}

TetRule make_tet5() {
  TetRule rule;
  rule.degree = 5;
  // Walkington's symmetric 14-point rule; weights normalised to volume 1.
  add_s31(rule, 0.31088591926330060980, 0.11268792571801585080);
  add_s31(rule, 0.092735250310891226402, 0.073493043116361949544);
  add_s22(rule, 0.045503704125649649492, 0.042546020777081466438);
  for (double& w : rule.weights) w /= 6.0;
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule_degree4() {
  static const TriangleRule rule = make_triangle4();
  return rule;
}

const TetRule& tet_rule_degree2() {
  static const TetRule rule = make_tet2();
  return rule;
}

const TetRule& tet_rule_degree5() {
  static const TetRule rule = make_tet5();
  return rule;
}

const TetRule& tet_rule_for_degree(int fe_degree) {
  switch (fe_degree) {
    case 1:
      return tet_rule_degree2();
    case 2:
      return tet_rule_degree5();
    default:
      throw SetupError("no volume quadrature for degree " + std::to_string(fe_degree));
  }
}

}  // namespace tracefem
