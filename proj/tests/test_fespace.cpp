#include "tracefem/fespace.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

using namespace tracefem;
using Catch::Matchers::WithinAbs;

namespace {

struct Band {
  BackgroundMesh mesh;
  ActiveSet active;
  Band(const BoundingBox& box, int level, const LevelSet& phi)
      : mesh(build_mesh(box, level)), active(select_active(mesh, phi)) {}
};

// Random point inside a random cell of the space.
std::pair<std::size_t, Vec3> random_band_point(const TraceSpace& space, std::mt19937& gen) {
  std::uniform_int_distribution<std::size_t> pick(0, space.n_cells() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t cell = pick(gen);
  Eigen::Vector4d b(u(gen), u(gen), u(gen), u(gen));
  b /= b.sum();
  return {cell, space.cell_geometry(cell).point(b)};
}

std::array<double, 3> lattice_of(const BackgroundMesh& mesh, const Vec3& x) {
  Mat3 s;
  for (int c = 0; c < 3; ++c) s.col(c) = mesh.box.span[c];
  const Vec3 xi = s.inverse() * (x - mesh.box.origin) * (2.0 * mesh.cells);
  return {xi[0], xi[1], xi[2]};
}

}  // namespace

TEST_CASE("P1 dofs are the vertices of active tets", "[fespace]") {
  const Band band(BoundingBox::sphere_case(), 1, LevelSet::sphere());
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (int t : band.active.tets) {
    const auto& v = band.mesh.tets[t];
    for (int i = 0; i < 4; ++i) {
      verts.insert(v[i]);
      for (int j = i + 1; j < 4; ++j) edges.insert({std::min(v[i], v[j]), std::max(v[i], v[j])});
    }
  }
  const TraceSpace p1 = build_space(band.mesh, band.active, 1);
  const TraceSpace p2 = build_space(band.mesh, band.active, 2);
  CHECK(p1.n_dof() == static_cast<int>(verts.size()));
  CHECK(p2.n_dof() == static_cast<int>(verts.size() + edges.size()));
  CHECK(p1.n_cells() == band.active.size());
  CHECK(p1.n_constrained() == 0);
}

TEST_CASE("degree outside {1,2} is rejected", "[fespace]") {
  const Band band(BoundingBox::sphere_case(), 1, LevelSet::sphere());
  CHECK_THROWS_AS(build_space(band.mesh, band.active, 3), SetupError);
  CHECK_THROWS_AS(build_space(band.mesh, band.active, 0), SetupError);
}

TEST_CASE("dof numbering is lexicographic with z slowest", "[fespace]") {
  const Band band(BoundingBox::plane_case(), 1, LevelSet::tilted_plane());
  const TraceSpace space = build_space(band.mesh, band.active, 2);
  auto key = [&](int d) {
    const auto c = lattice_of(band.mesh, space.node(d));
    return std::array<long, 3>{std::lround(c[2]), std::lround(c[1]), std::lround(c[0])};
  };
  for (int d = 1; d < space.n_dof(); ++d) CHECK(key(d - 1) < key(d));
  // cell-local node coordinates agree with the global node table
  for (std::size_t c = 0; c < space.n_cells(); ++c) {
    const TetGeometry geo = space.cell_geometry(c);
    for (int i = 0; i < space.nodes_per_cell(); ++i)
      CHECK((geo.node(i) - space.node(space.cell_dofs(c)[i])).norm() < 1e-13);
  }
}

TEST_CASE("plane Dirichlet faces and constrained dofs", "[fespace]") {
  const LevelSet phi = LevelSet::tilted_plane();
  const Band band(BoundingBox::plane_case(), 1, phi);
  const DirichletSpec spec = DirichletSpec::faces_cut_by(band.mesh, phi);
  // the plane is parallel to the faces spanned by e2, e3 and crosses the other four
  CHECK_FALSE(spec.faces[0]);
  CHECK_FALSE(spec.faces[1]);
  for (int f = 2; f < 6; ++f) CHECK(spec.faces[f]);
  CHECK_FALSE(DirichletSpec::faces_cut_by(build_mesh(BoundingBox::sphere_case(), 1), LevelSet::sphere()).any());

  for (int degree : {1, 2}) {
    const TraceSpace space = build_space(band.mesh, band.active, degree, spec);
    const double top = 2.0 * band.mesh.cells;
    int expected = 0;
    for (int d = 0; d < space.n_dof(); ++d) {
      const auto c = lattice_of(band.mesh, space.node(d));
      const bool on = std::abs(c[1]) < 1e-9 || std::abs(c[1] - top) < 1e-9 || std::abs(c[2]) < 1e-9 ||
                      std::abs(c[2] - top) < 1e-9;
      CHECK(space.constrained(d) == on);
      expected += on;
    }
    CHECK(space.n_constrained() == expected);
    CHECK(expected > 0);
  }
}

TEST_CASE("nodal interpolation", "[fespace]") {
  const Band band(BoundingBox::sphere_case(), 2, LevelSet::sphere());
  const TraceSpace p1 = build_space(band.mesh, band.active, 1);
  const TraceSpace p2 = build_space(band.mesh, band.active, 2);
  std::mt19937 gen(17);

  SECTION("constants") {
    const FEFunction one = interpolate(p2, ScalarFunction([](const Vec3&) { return 1.0; }));
    CHECK((one.coefficients().array() == 1.0).all());
    for (int t = 0; t < 20; ++t) {
      const auto [cell, x] = random_band_point(p2, gen);
      CHECK_THAT(one.scalar_value(cell, x), WithinAbs(1.0, 1e-13));
      CHECK(one.scalar_gradient(cell, x).norm() < 1e-12);
    }
  }
  SECTION("quadratics are reproduced by P2") {
    auto f = [](const Vec3& x) { return x[0] * x[1]; };
    const FEFunction u = interpolate(p2, ScalarFunction(f));
    for (int t = 0; t < 50; ++t) {
      const auto [cell, x] = random_band_point(p2, gen);
      CHECK_THAT(u.scalar_value(cell, x), WithinAbs(f(x), 1e-13));
      CHECK((u.scalar_gradient(cell, x) - Vec3(x[1], x[0], 0)).norm() < 1e-12);
    }
  }
  SECTION("vector interpolation is interleaved") {
    const VectorFunction g = [](const Vec3& x) -> Vec3 { return Vec3(1.0, x[0], x[1] - x[2]); };
    const FEFunction u = interpolate(p1, g);
    REQUIRE(u.coefficients().size() == 3 * p1.n_dof());
    for (int d = 0; d < p1.n_dof(); d += 7) CHECK((u.coefficients().segment<3>(3 * d) - g(p1.node(d))).norm() == 0.0);
    for (int t = 0; t < 20; ++t) {
      const auto [cell, x] = random_band_point(p1, gen);
      CHECK((u.value(cell, x) - g(x)).norm() < 1e-13);
      Mat3 grad;
      grad << 0, 0, 0, 1, 0, 0, 0, 1, -1;
      CHECK((u.gradient(cell, x) - grad).norm() < 1e-12);
    }
  }
  SECTION("values at nodes are the coefficients") {
    std::normal_distribution<double> n(0.0, 1.0);
    FEFunction u(p2, 1);
    for (int d = 0; d < p2.n_dof(); ++d) u.coefficients()[d] = n(gen);
    for (std::size_t c = 0; c < p2.n_cells(); c += 5)
      for (int i = 0; i < 10; ++i)
        CHECK_THAT(u.scalar_value(c, p2.node(p2.cell_dofs(c)[i])), WithinAbs(u.coefficients()[p2.cell_dofs(c)[i]], 1e-12));
  }
}

TEST_CASE("P2 contains P1", "[fespace]") {
  const Band band(BoundingBox::sphere_case(), 2, LevelSet::sphere());
  const TraceSpace p1 = build_space(band.mesh, band.active, 1);
  const TraceSpace p2 = build_space(band.mesh, band.active, 2);
  std::mt19937 gen(21);
  std::normal_distribution<double> n(0.0, 1.0);
  FEFunction u1(p1, 1);
  for (int d = 0; d < p1.n_dof(); ++d) u1.coefficients()[d] = n(gen);
  // the same cells in both spaces: interpolate u1 cell by cell
  FEFunction u2(p2, 1);
  for (std::size_t c = 0; c < p2.n_cells(); ++c)
    for (int i = 0; i < 10; ++i) u2.coefficients()[p2.cell_dofs(c)[i]] = u1.scalar_value(c, p2.node(p2.cell_dofs(c)[i]));
  for (int t = 0; t < 100; ++t) {
    const auto [cell, x] = random_band_point(p2, gen);
    CHECK_THAT(u2.scalar_value(cell, x), WithinAbs(u1.scalar_value(cell, x), 1e-12));
  }
}

TEST_CASE("P1 gradient is piecewise constant and matches differences", "[fespace]") {
  const Band band(BoundingBox::sphere_case(), 2, LevelSet::sphere());
  std::mt19937 gen(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int degree : {1, 2}) {
    const TraceSpace space = build_space(band.mesh, band.active, degree);
    FEFunction f(space, 3);
    for (Eigen::Index i = 0; i < f.coefficients().size(); ++i) f.coefficients()[i] = n(gen);
    for (int t = 0; t < 20; ++t) {
      const std::size_t cell = t * 7 % space.n_cells();
      const TetGeometry geo = space.cell_geometry(cell);
      const Vec3 x = geo.point(Eigen::Vector4d(0.25, 0.25, 0.25, 0.25));
      const Vec3 y = geo.point(Eigen::Vector4d(0.4, 0.3, 0.2, 0.1));
      if (degree == 1) CHECK((f.gradient(cell, x) - f.gradient(cell, y)).norm() < 1e-12 * f.gradient(cell, x).norm());
      const double d = 1e-5 * band.mesh.h;
      Mat3 fd;
      for (int k = 0; k < 3; ++k)
        fd.col(k) = (f.value(cell, x + d * Vec3::Unit(k)) - f.value(cell, x - d * Vec3::Unit(k))) / (2 * d);
      CHECK((fd - f.gradient(cell, x)).norm() < 1e-6 * f.gradient(cell, x).norm());
    }
  }
}

TEST_CASE("P1 interpolation error of phi is O(h^2)", "[fespace]") {
  const LevelSet phi = LevelSet::sphere();
  std::vector<double> c;
  std::mt19937 gen(33);
  for (int level = 1; level <= 3; ++level) {
    const Band band(BoundingBox::sphere_case(), level, phi);
    const TraceSpace p1 = build_space(band.mesh, band.active, 1);
    const FEFunction i1 = interpolate(p1, ScalarFunction([&](const Vec3& x) { return phi.value(x); }));
    double err = 0;
    for (int t = 0; t < 200; ++t) {
      const auto [cell, x] = random_band_point(p1, gen);
      err = std::max(err, std::abs(i1.scalar_value(cell, x) - phi.value(x)));
    }
    c.push_back(err / (band.mesh.h * band.mesh.h));
  }
  INFO("max |I1 phi - phi| / h^2: " << c[0] << " " << c[1] << " " << c[2]);
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  CHECK(*hi / *lo < 3.0);
}

TEST_CASE("point evaluation locates the cell", "[fespace]") {
  const Band band(BoundingBox::sphere_case(), 2, LevelSet::sphere());
  const TraceSpace p2 = build_space(band.mesh, band.active, 2);
  auto f = [](const Vec3& x) { return x[2] * x[2] - x[0]; };
  const FEFunction u = interpolate(p2, ScalarFunction(f));
  const Vec3 x(0.1, 0.2, std::sqrt(1 - 0.05));
  CHECK_THAT(u.value(x)[0], WithinAbs(f(x), 1e-13));
  CHECK_THROWS_AS(u.value(Vec3(0, 0, 0)), SetupError);
  CHECK_THROWS_AS(FEFunction(p2, 2), SetupError);
  CHECK_THROWS_AS(FEFunction(p2, 1, Vector::Zero(3)), SetupError);
}
