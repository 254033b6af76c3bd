#include "tracefem/geometry.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace tracefem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::array<Vec3, 4> kRef{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

double linear_interp(const std::array<Vec3, 4>& x, const std::array<double, 4>& f, const Vec3& p) {
  const Eigen::Vector4d b = TetGeometry(x).barycentric(p);
  return b[0] * f[0] + b[1] * f[1] + b[2] * f[2] + b[3] * f[3];
}

Vec3 random_unit(std::mt19937& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vec3(g(gen), g(gen), g(gen)).normalized();
}

}  // namespace

TEST_CASE("one negative vertex gives one triangle", "[geometry]") {
  const std::array<double, 4> f{-1.0, 1.0, 2.0, 3.0};
  const auto tris = cut_tetrahedron(kRef, f, {0, 1, 2, 3});
  REQUIRE(tris.size() == 1);
  for (const auto& p : tris[0]) CHECK(std::abs(linear_interp(kRef, f, p)) < 1e-14);
  // cut points at t = 1/2, 1/3, 1/4 along the edges from vertex 0
  CHECK_THAT((tris[0][0] + tris[0][1] + tris[0][2]).sum(), WithinAbs(0.5 + 1.0 / 3 + 0.25, 1e-14));
}

TEST_CASE("two negative vertices give a planar quad split in two", "[geometry]") {
  const std::array<double, 4> f{-1.0, -0.5, 1.0, 2.0};
  const auto tris = cut_tetrahedron(kRef, f, {0, 1, 2, 3});
  REQUIRE(tris.size() == 2);
  Vec3 grad = Vec3::Zero();
  const TetGeometry geo(kRef);
  for (int i = 0; i < 4; ++i) grad += f[i] * geo.grad_barycentric(i);
  for (const auto& t : tris) {
    for (const auto& p : t) CHECK(std::abs(linear_interp(kRef, f, p)) < 1e-14);
    const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]);
    CHECK(n.dot(grad) > 0);
    CHECK(n.normalized().cross(grad.normalized()).norm() < 1e-12);
  }
  // the two triangles share a diagonal
  int shared = 0;
  for (const auto& p : tris[0])
    for (const auto& q : tris[1]) shared += (p - q).norm() < 1e-15;
  CHECK(shared == 2);
}

TEST_CASE("quad diagonal depends only on global vertex ids", "[geometry]") {
  const std::array<double, 4> f{-1.0, -0.5, 1.0, 2.0};
  const auto a = cut_tetrahedron(kRef, f, {0, 1, 2, 3});
  // same tet with the vertices listed in another order
  const std::array<Vec3, 4> x2{kRef[2], kRef[0], kRef[3], kRef[1]};
  const std::array<double, 4> f2{f[2], f[0], f[3], f[1]};
  const auto b = cut_tetrahedron(x2, f2, {2, 0, 3, 1});
  REQUIRE(b.size() == 2);
  auto diagonal = [](const std::vector<std::array<Vec3, 3>>& t) {
    std::vector<Vec3> d;
    for (const auto& p : t[0])
      for (const auto& q : t[1])
        if ((p - q).norm() < 1e-15) d.push_back(p);
    return d;
  };
  const auto da = diagonal(a), db = diagonal(b);
  REQUIRE(da.size() == 2);
  REQUIRE(db.size() == 2);
  const bool same = ((da[0] - db[0]).norm() < 1e-15 && (da[1] - db[1]).norm() < 1e-15) ||
                    ((da[0] - db[1]).norm() < 1e-15 && (da[1] - db[0]).norm() < 1e-15);
  CHECK(same);
}

TEST_CASE("uniform sign gives no triangle", "[geometry]") {
  CHECK(cut_tetrahedron(kRef, {1, 2, 3, 4}, {0, 1, 2, 3}).empty());
  CHECK(cut_tetrahedron(kRef, {-1, -2, -3, -4}, {0, 1, 2, 3}).empty());
}

TEST_CASE("surface triangles lie on the zero level inside their tets", "[geometry]") {
  const BackgroundMesh mesh = build_mesh(BoundingBox::sphere_case(), 2);
  const LevelSet phi = LevelSet::sphere();
  const ActiveSet active = select_active(mesh, phi);
  const SurfaceMesh surface = extract_surface(mesh, active);
  REQUIRE(surface.first.size() == active.size() + 1);
  double area = 0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const int tet = active.tets[a];
    const auto x = mesh.tet_vertices(tet);
    std::array<double, 4> f;
    for (int i = 0; i < 4; ++i) f[i] = active.vertex_phi[mesh.tets[tet][i]];
    const TetGeometry geo(x);
    for (const auto& tri : surface.in_active(static_cast<int>(a))) {
      CHECK(tri.tet == tet);
      area += tri.area;
      Vec3 centroid = Vec3::Zero();
      for (const auto& p : tri.points) {
        CHECK(std::abs(linear_interp(x, f, p)) < 1e-13);
        CHECK(geo.barycentric(p).minCoeff() > -1e-12);
        centroid += p / 3.0;
      }
      CHECK(tri.normal.dot(phi.gradient(centroid)) > 0);
      CHECK_THAT(tri.normal.norm(), WithinAbs(1.0, 1e-12));
    }
  }
  CHECK_THAT(area, WithinRel(surface.total_area, 1e-13));
}

TEST_CASE("neighbouring triangles are consistently oriented", "[geometry]") {
  const BackgroundMesh mesh = build_mesh(BoundingBox::sphere_case(), 2);
  const ActiveSet active = select_active(mesh, LevelSet::sphere(Vec3(0.03, -0.02, 0.01)));
  const SurfaceMesh surface = extract_surface(mesh, active);
  std::map<std::array<long long, 3>, std::vector<int>> at_point;
  for (std::size_t t = 0; t < surface.triangles.size(); ++t)
    for (const auto& p : surface.triangles[t].points) {
      const std::array<long long, 3> key{std::llround(p[0] * 1e9), std::llround(p[1] * 1e9),
                                         std::llround(p[2] * 1e9)};
      at_point[key].push_back(static_cast<int>(t));
    }
  double worst = 1;
  for (const auto& [key, tris] : at_point)
    for (int a : tris)
      for (int b : tris)
        if (surface.triangles[a].tet != surface.triangles[b].tet)
          worst = std::min(worst, surface.triangles[a].normal.dot(surface.triangles[b].normal));
  CHECK(worst > 0);
}

TEST_CASE("sphere area converges to 4 pi at second order", "[geometry]") {
  const LevelSet phi = LevelSet::sphere();
  std::vector<double> err, scaled;
  for (int level = 1; level <= 5; ++level) {
    const BackgroundMesh mesh = build_mesh(BoundingBox::sphere_case(), level);
    const ActiveSet active = select_active(mesh, phi);
    const SurfaceMesh surface = extract_surface(mesh, active);
    err.push_back(std::abs(surface.total_area - 4 * std::numbers::pi));
    double dist = 0;
    for (const auto& t : surface.triangles)
      for (const auto& p : t.points) dist = std::max(dist, std::abs(phi.value(p)));
    scaled.push_back(dist / (mesh.h * mesh.h));
  }
  const double order = std::log2(err[3] / err[4]);
  INFO("area errors " << err[0] << " " << err[1] << " " << err[2] << " " << err[3] << " " << err[4]);
  CHECK(order >= 1.8);
  // dist(Gamma, Gamma_h) / h^2 stays bounded
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  INFO("max |phi| / h^2 per level: " << scaled[0] << " " << scaled[1] << " " << scaled[2] << " " << scaled[3]
                                    << " " << scaled[4]);
  CHECK(*hi / *lo < 2.0);
}

TEST_CASE("level set closest point maps", "[geometry]") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const LevelSet sphere = LevelSet::sphere();
  const LevelSet plane = LevelSet::tilted_plane();
  const Vec3 a(4, 0, -1);
  for (int t = 0; t < 50; ++t) {
    const Vec3 x(u(gen), u(gen), u(gen));
    CHECK((sphere.closest_point(x) - x / x.norm()).norm() < 1e-14);
    const Vec3 p = x - plane.value(x) * a / a.squaredNorm();
    CHECK((plane.closest_point(x) - p).norm() < 1e-13);
    CHECK(std::abs(plane.value(plane.closest_point(x))) < 1e-13);
    // idempotent, and the identity on the surface
    CHECK((sphere.closest_point(sphere.closest_point(x)) - sphere.closest_point(x)).norm() < 1e-14);
    CHECK((plane.closest_point(p) - p).norm() < 1e-13);
  }
  CHECK_THAT(plane.value(Vec3(1, 0, 0)), WithinAbs(4 - 13.0 / 3.0, 1e-15));
  CHECK_THAT(sphere.value(Vec3(0, 2, 0)), WithinAbs(1.0, 1e-15));
}

TEST_CASE("extension is constant along normals", "[geometry]") {
  const LevelSet sphere = LevelSet::sphere();
  const VectorFunction u = [](const Vec3& x) -> Vec3 { return Vec3(x[1], -x[0], x[2] * x[2]); };
  const VectorFunction ue = extend(sphere, u);
  std::mt19937 gen(4);
  for (int t = 0; t < 20; ++t) {
    const Vec3 n = random_unit(gen);
    const Vec3 x = 1.2 * n;
    CHECK((ue(x) - u(n)).norm() < 1e-14);
    CHECK((ue(sphere.closest_point(x)) - ue(x)).norm() < 1e-14);
  }
}

TEST_CASE("exact shape operators", "[geometry]") {
  std::mt19937 gen(8);
  const LevelSet sphere = LevelSet::sphere();
  for (int t = 0; t < 20; ++t) {
    const Vec3 x = random_unit(gen);
    const Mat3 H = sphere.shape_operator(x);
    CHECK((H - (Mat3::Identity() - x * x.transpose())).norm() < 1e-14);
    CHECK((H * sphere.normal(x)).norm() < 1e-14);
  }
  const LevelSet plane = LevelSet::tilted_plane();
  CHECK(plane.shape_operator(Vec3(0.3, 0.1, -0.2)).norm() == 0.0);
  CHECK((plane.normal(Vec3::Zero()) - Vec3(4, 0, -1).normalized()).norm() < 1e-15);
}

TEST_CASE("interpolated normals and shape operator", "[geometry]") {
  const BackgroundMesh mesh = build_mesh(BoundingBox::sphere_case(), 3);
  const LevelSet phi = LevelSet::sphere();
  const NormalField nh(mesh, phi, NormalMode::interpolated);
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> r(0.9, 1.1);
  double nerr = 0, herr = 0;
  for (int t = 0; t < 100; ++t) {
    const Vec3 x = r(gen) * random_unit(gen);
    const Vec3 n = nh.normal(x);
    const Mat3 H = shape_operator(nh, x);
    CHECK_THAT(n.norm(), WithinAbs(1.0, 1e-14));
    CHECK((H * n).norm() < 1e-10);
    CHECK((H - H.transpose()).norm() < 1e-12);
    CHECK((nh.projector(x) * n).norm() < 1e-14);
    nerr = std::max(nerr, (n - phi.normal(x)).norm());
    herr = std::max(herr, (H - phi.shape_operator(x)).norm());
  }
  // I_2 phi: normals of order h^2, curvature of order h
  CHECK(nerr < 0.05);
  CHECK(herr < 0.5);
  CHECK_THROWS_AS(nh.normal(Vec3(5, 0, 0)), SetupError);
}

TEST_CASE("plane normals are exact in both modes", "[geometry]") {
  const BackgroundMesh mesh = build_mesh(BoundingBox::plane_case(), 1);
  const LevelSet phi = LevelSet::tilted_plane();
  const NormalField nh(mesh, phi, NormalMode::interpolated);
  const NormalField ne(mesh, phi, NormalMode::exact);
  std::mt19937 gen(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int t = 0; t < 50; ++t) {
    const Vec3 x = mesh.box.origin + u(gen) * mesh.box.span[0] + u(gen) * mesh.box.span[1] +
                   u(gen) * mesh.box.span[2];
    CHECK((nh.normal(x) - ne.normal(x)).norm() < 1e-12);
    CHECK(shape_operator(nh, x).norm() < 1e-10);
    CHECK(shape_operator(ne, x).norm() == 0.0);
  }
}

TEST_CASE("surface VTK dump", "[geometry]") {
  const BackgroundMesh mesh = build_mesh(BoundingBox::sphere_case(), 1);
  const SurfaceMesh surface = extract_surface(mesh, select_active(mesh, LevelSet::sphere()));
  std::ostringstream os;
  std::vector<Vec3> data(3 * surface.triangles.size(), Vec3(1, 2, 3));
  write_vtk(os, surface, data);
  const std::string s = os.str();
  CHECK_THAT(s, ContainsSubstring("DATASET POLYDATA"));
  CHECK_THAT(s, ContainsSubstring("POLYGONS " + std::to_string(surface.triangles.size())));
  CHECK_THAT(s, ContainsSubstring("VECTORS u_h double"));
}
