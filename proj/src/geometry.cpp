#include "tracefem/geometry.hpp"

#include <algorithm>
#include <ostream>

namespace tracefem {

namespace {

Vec3 edge_cut(const Vec3& xa, const Vec3& xb, double fa, double fb) {
  const double t = std::clamp(fa / (fa - fb), 0.0, 1.0);
  return xa + t * (xb - xa);
}

}  // namespace

std::vector<std::array<Vec3, 3>> cut_tetrahedron(const std::array<Vec3, 4>& x,
                                                 const std::array<double, 4>& f,
                                                 const std::array<int, 4>& ids) {
  std::array<int, 4> neg{}, pos{};
  int nn = 0, np = 0;
  for (int i = 0; i < 4; ++i) {
    if (f[i] < 0.0)
      neg[nn++] = i;
    else
      pos[np++] = i;
  }
  std::vector<std::array<Vec3, 3>> tris;
  if (nn == 0 || np == 0) return tris;

  auto cut = [&](int a, int b) { return edge_cut(x[a], x[b], f[a], f[b]); };

  if (nn == 1 || np == 1) {
    const int odd = nn == 1 ? neg[0] : pos[0];
    std::array<int, 3> others{};
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != odd) others[k++] = i;
    tris.push_back({cut(odd, others[0]), cut(odd, others[1]), cut(odd, others[2])});
  } else {
    const std::array<std::array<int, 2>, 4> edges{
        {{neg[0], pos[0]}, {neg[0], pos[1]}, {neg[1], pos[1]}, {neg[1], pos[0]}}};
    std::array<Vec3, 4> q;
    int smallest = 0;
    auto key = [&](int e) {
      const int a = ids[edges[e][0]];
      const int b = ids[edges[e][1]];
      return std::pair{std::min(a, b), std::max(a, b)};
    };
    for (int e = 0; e < 4; ++e) {
      q[e] = cut(edges[e][0], edges[e][1]);
      if (key(e) < key(smallest)) smallest = e;
    }
    if (smallest % 2 == 0) {
      tris.push_back({q[0], q[1], q[2]});
      tris.push_back({q[0], q[2], q[3]});
    } else {
      tris.push_back({q[1], q[2], q[3]});
      tris.push_back({q[1], q[3], q[0]});
    }
  }

  const TetGeometry geo(x);
  Vec3 grad = Vec3::Zero();
  for (int i = 0; i < 4; ++i) grad += f[i] * geo.grad_barycentric(i);
  for (auto& t : tris) {
    if ((t[1] - t[0]).cross(t[2] - t[0]).dot(grad) < 0.0) std::swap(t[1], t[2]);
  }
  return tris;
}

SurfaceMesh extract_surface(const BackgroundMesh& mesh, const ActiveSet& active) {
  SurfaceMesh surface;
  surface.first.reserve(active.size() + 1);
  for (std::size_t a = 0; a < active.size(); ++a) {
    surface.first.push_back(static_cast<int>(surface.triangles.size()));
    const int tet = active.tets[a];
    const auto& ids = mesh.tets[tet];
    const auto x = mesh.tet_vertices(tet);
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) f[i] = active.vertex_phi[ids[i]];
    for (const auto& pts : cut_tetrahedron(x, f, ids)) {
      SurfaceTriangle tri;
      tri.points = pts;
      tri.tet = tet;
      tri.active = static_cast<int>(a);
      const Vec3 c = (pts[1] - pts[0]).cross(pts[2] - pts[0]);
      tri.area = 0.5 * c.norm();
      tri.normal = tri.area > 0.0 ? Vec3(c.normalized()) : Vec3::Zero();
      surface.total_area += tri.area;
      surface.triangles.push_back(tri);
    }
  }
  surface.first.push_back(static_cast<int>(surface.triangles.size()));
  return surface;
}

TetNormal::TetNormal(NormalMode mode, const LevelSet* phi, const TetGeometry& geo)
    : mode_(mode), phi_(phi), geo_(geo) {
  if (mode_ == NormalMode::interpolated)
    for (int i = 0; i < 10; ++i) coeff_[i] = phi_->value(geo_.node(i));
}

Vec3 TetNormal::interpolant_gradient(const Vec3& x) const {
  std::array<Vec3, 10> grads;
  shape_gradients(2, geo_, geo_.barycentric(x), grads);
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 10; ++i) g += coeff_[i] * grads[i];
  return g;
}

Vec3 TetNormal::normal(const Vec3& x) const {
  if (mode_ == NormalMode::exact) return phi_->normal(x);
  return interpolant_gradient(x).normalized();
}

Mat3 TetNormal::projector(const Vec3& x) const {
  const Vec3 n = normal(x);
  return Mat3::Identity() - n * n.transpose();
}

Mat3 TetNormal::shape_operator(const Vec3& x) const {
  if (mode_ == NormalMode::exact) return phi_->shape_operator(x);
  std::array<Mat3, 10> hess;
  shape_hessians(2, geo_, hess);
  Mat3 hphi = Mat3::Zero();
  for (int i = 0; i < 10; ++i) hphi += coeff_[i] * hess[i];
  const Vec3 g = interpolant_gradient(x);
  const Vec3 n = g.normalized();
  const Mat3 p = Mat3::Identity() - n * n.transpose();
  return p * hphi * p / g.norm();
}

NormalField::NormalField(const BackgroundMesh& mesh, const LevelSet& phi, NormalMode mode)
    : mesh_(&mesh), phi_(&phi), mode_(mode) {}

TetNormal NormalField::on_tet(int tet) const {
  return TetNormal(mode_, phi_, TetGeometry(mesh_->tet_vertices(tet)));
}

int NormalField::containing_tet(const Vec3& x) const {
  const auto tet = mesh_->locate(x);
  if (!tet) throw SetupError("point outside the background mesh");
  return *tet;
}

Vec3 NormalField::normal(const Vec3& x) const {
  if (mode_ == NormalMode::exact) return phi_->normal(x);
  return on_tet(containing_tet(x)).normal(x);
}

Mat3 NormalField::projector(const Vec3& x) const {
  const Vec3 n = normal(x);
  return Mat3::Identity() - n * n.transpose();
}

Mat3 NormalField::shape_operator(const Vec3& x) const {
  if (mode_ == NormalMode::exact) return phi_->shape_operator(x);
  return on_tet(containing_tet(x)).shape_operator(x);
}

Mat3 shape_operator(const NormalField& normals, const Vec3& x) { return normals.shape_operator(x); }

void write_vtk(std::ostream& os, const SurfaceMesh& surface, const std::vector<Vec3>& point_vectors,
               const std::string& field_name) {
  const std::size_t nt = surface.triangles.size();
  os << "# vtk DataFile Version 3.0\nsurface triangulation\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << 3 * nt << " double\n";
  os.precision(12);
  for (const auto& t : surface.triangles)
    for (const auto& p : t.points) os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  os << "POLYGONS " << nt << ' ' << 4 * nt << '\n';
  for (std::size_t i = 0; i < nt; ++i)
    os << "3 " << 3 * i << ' ' << 3 * i + 1 << ' ' << 3 * i + 2 << '\n';
  os << "CELL_DATA " << nt << "\nNORMALS normal double\n";
  for (const auto& t : surface.triangles)
    os << t.normal[0] << ' ' << t.normal[1] << ' ' << t.normal[2] << '\n';
  if (point_vectors.size() == 3 * nt) {
    os << "POINT_DATA " << 3 * nt << "\nVECTORS " << field_name << " double\n";
    for (const auto& v : point_vectors) os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
}

}  // namespace tracefem
