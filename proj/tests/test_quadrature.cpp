#include "tracefem/quadrature.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace tracefem;
using Catch::Matchers::WithinAbs;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Reference triangle (0,0),(1,0),(0,1): int x^a y^b = a! b! / (a+b+2)!
double triangle_exact(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

// Reference tet: int x^a y^b z^c = a! b! c! / (a+b+c+3)!
double tet_exact(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

void check_triangle(const TriangleRule& rule) {
  double wsum = 0;
  for (double w : rule.weights) {
    CHECK(w > 0);
    wsum += w;
  }
  CHECK_THAT(wsum, WithinAbs(0.5, 1e-15));
  for (int a = 0; a <= rule.degree; ++a)
    for (int b = 0; a + b <= rule.degree; ++b) {
      double q = 0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        // barycentric (1-x-y, x, y)
        const double x = rule.points[i][1], y = rule.points[i][2];
        q += rule.weights[i] * std::pow(x, a) * std::pow(y, b);
      }
      INFO("x^" << a << " y^" << b);
      CHECK_THAT(q, WithinAbs(triangle_exact(a, b), 1e-15));
    }
}

void check_tet(const TetRule& rule) {
  double wsum = 0;
  for (double w : rule.weights) {
    CHECK(w > 0);
    wsum += w;
  }
  CHECK_THAT(wsum, WithinAbs(1.0 / 6.0, 1e-15));
  for (const auto& p : rule.points) CHECK_THAT(p.sum(), WithinAbs(1.0, 1e-14));
  for (int a = 0; a <= rule.degree; ++a)
    for (int b = 0; a + b <= rule.degree; ++b)
      for (int c = 0; a + b + c <= rule.degree; ++c) {
        double q = 0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
          const auto& p = rule.points[i];
          q += rule.weights[i] * std::pow(p[1], a) * std::pow(p[2], b) * std::pow(p[3], c);
        }
        INFO("x^" << a << " y^" << b << " z^" << c);
        CHECK_THAT(q, WithinAbs(tet_exact(a, b, c), 1e-15));
      }
}

}  // namespace

TEST_CASE("triangle rule integrates monomials up to degree 4", "[quadrature]") {
  const auto& rule = triangle_rule_degree4();
  REQUIRE(rule.degree == 4);
  REQUIRE(rule.size() == 6);
  check_triangle(rule);
}

TEST_CASE("tet rules integrate monomials up to their degree", "[quadrature]") {
  SECTION("4-point degree 2") {
    REQUIRE(tet_rule_degree2().degree == 2);
    REQUIRE(tet_rule_degree2().size() == 4);
    check_tet(tet_rule_degree2());
  }
  SECTION("14-point degree 5") {
    REQUIRE(tet_rule_degree5().degree == 5);
    REQUIRE(tet_rule_degree5().size() == 14);
    check_tet(tet_rule_degree5());
  }
}

TEST_CASE("degree-2 tet rule is not exact beyond its degree", "[quadrature]") {
  const auto& rule = tet_rule_degree2();
  double q = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) q += rule.weights[i] * std::pow(rule.points[i][1], 4);
  CHECK(std::abs(q - tet_exact(4, 0, 0)) > 1e-6);
}

TEST_CASE("volume rule follows the element degree", "[quadrature]") {
  CHECK(&tet_rule_for_degree(1) == &tet_rule_degree2());
  CHECK(&tet_rule_for_degree(2) == &tet_rule_degree5());
}
