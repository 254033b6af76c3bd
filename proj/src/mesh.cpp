#include "tracefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace tracefem {

namespace {

// Kuhn triangulation of the unit cube: tet p walks from (0,0,0) to (1,1,1)
// along the axes in order kPermutations[p].
constexpr std::array<std::array<int, 3>, 6> kPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

Mat3 span_matrix(const BoundingBox& box) {
  Mat3 s;
  for (int c = 0; c < 3; ++c) s.col(c) = box.span[c];
  return s;
}

}  // namespace

BoundingBox BoundingBox::sphere_case() {
  BoundingBox box;
  box.origin = Vec3::Constant(-5.0 / 3.0);
  box.span = {Vec3(10.0 / 3.0, 0, 0), Vec3(0, 10.0 / 3.0, 0), Vec3(0, 0, 10.0 / 3.0)};
  box.root_cells = 2;
  return box;
}

BoundingBox BoundingBox::plane_case() {
  BoundingBox box;
  box.origin = Vec3(-2.0, -2.0, -65.0 / 48.0);
  box.span = {Vec3(4.0, 0.0, -1.0), Vec3(0.0, 4.0, 0.0), Vec3(0.0, 0.0, 4.25)};
  box.root_cells = 4;
  return box;
}

double BoundingBox::signed_volume() const { return span_matrix(*this).determinant(); }

int BoundingBox::cells_at_level(int level) const { return root_cells << level; }

std::array<int, 3> BackgroundMesh::lattice(int vertex) const {
  const int m = cells + 1;
  return {vertex % m, (vertex / m) % m, vertex / (m * m)};
}

std::array<Vec3, 4> BackgroundMesh::tet_vertices(int tet) const {
  const auto& t = tets[tet];
  return {vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]};
}

double BackgroundMesh::tet_volume(int tet) const {
  const auto v = tet_vertices(tet);
  Mat3 j;
  j << v[1] - v[0], v[2] - v[0], v[3] - v[0];
  return j.determinant() / 6.0;
}

std::optional<int> BackgroundMesh::locate(const Vec3& x) const {
  const Vec3 xi = span_matrix(box).inverse() * (x - box.origin) * cells;
  constexpr double slack = 1e-12;
  std::array<int, 3> cell{};
  std::array<double, 3> local{};
  for (int c = 0; c < 3; ++c) {
    if (xi[c] < -slack * cells || xi[c] > cells * (1.0 + slack)) return std::nullopt;
    cell[c] = std::clamp(static_cast<int>(std::floor(xi[c])), 0, cells - 1);
    local[c] = xi[c] - cell[c];
  }
  // The Kuhn tet containing a point is selected by the ordering of its local coordinates.
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return local[a] > local[b]; });
  const auto it = std::find(kPermutations.begin(), kPermutations.end(), order);
  const int perm = static_cast<int>(it - kPermutations.begin());
  const int cube = cell[0] + cells * (cell[1] + cells * cell[2]);
  return 6 * cube + perm;
}

BackgroundMesh build_mesh(const BoundingBox& box, int level) {
  if (level < 0) throw SetupError("mesh level must be nonnegative");
  if (box.root_cells < 1) throw SetupError("bounding box needs at least one root cell");
  const double vol = box.signed_volume();
  const double scale = box.span[0].norm() * box.span[1].norm() * box.span[2].norm();
  if (!(std::abs(vol) > 1e-12 * scale)) throw SetupError("degenerate bounding box");

  BackgroundMesh mesh;
  mesh.box = box;
  mesh.level = level;
  mesh.cells = box.cells_at_level(level);
  const int n = mesh.cells;
  mesh.h = box.span[0].lpNorm<Eigen::Infinity>() / n;

  const int m = n + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        mesh.vertices.push_back(box.origin + (double(i) / n) * box.span[0] +
                                (double(j) / n) * box.span[1] + (double(k) / n) * box.span[2]);

  // Orientation of each permutation's tet is fixed by the box orientation and
  // the permutation parity; decide once on the reference cube.
  std::array<bool, 6> flip{};
  for (int p = 0; p < 6; ++p) {
    std::array<int, 3> c{0, 0, 0};
    std::array<Vec3, 4> v;
    v[0] = Vec3::Zero();
    for (int s = 0; s < 3; ++s) {
      ++c[kPermutations[p][s]];
      v[s + 1] = c[0] * box.span[0] + c[1] * box.span[1] + c[2] * box.span[2];
    }
    Mat3 j;
    j << v[1] - v[0], v[2] - v[0], v[3] - v[0];
    flip[p] = j.determinant() < 0.0;
  }

  mesh.tets.reserve(static_cast<std::size_t>(6) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int p = 0; p < 6; ++p) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = mesh.vertex_index(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[kPermutations[p][s]];
            t[s + 1] = mesh.vertex_index(c[0], c[1], c[2]);
          }
          if (flip[p]) std::swap(t[2], t[3]);
          mesh.tets.push_back(t);
        }
  return mesh;
}

ActiveSet select_active(const BackgroundMesh& mesh, const LevelSet& phi) {
  ActiveSet active;
  active.zero_tolerance = 1e-12 * mesh.h;
  active.vertex_phi.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    double value = phi.value(mesh.vertices[v]);
    if (std::abs(value) < active.zero_tolerance) value = active.zero_tolerance;
    active.vertex_phi[v] = value;
  }
  active.tet_to_active.assign(mesh.tets.size(), -1);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    int negative = 0;
    for (int v : mesh.tets[t]) negative += active.vertex_phi[v] < 0.0;
    if (negative > 0 && negative < 4) {
      active.tet_to_active[t] = static_cast<int>(active.tets.size());
      active.tets.push_back(static_cast<int>(t));
    }
  }
  if (active.tets.empty()) throw SetupError("surface not found");
  return active;
}

void write_vtk(std::ostream& os, const BackgroundMesh& mesh, const std::vector<int>& subset) {
  std::vector<int> cells = subset;
  if (cells.empty()) {
    cells.resize(mesh.tets.size());
    for (std::size_t t = 0; t < cells.size(); ++t) cells[t] = static_cast<int>(t);
  }
  os << "# vtk DataFile Version 3.0\nbackground mesh level " << mesh.level
     << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.vertices.size() << " double\n";
  os.precision(12);
  for (const auto& v : mesh.vertices) os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  os << "CELLS " << cells.size() << ' ' << 5 * cells.size() << '\n';
  for (int t : cells) {
    const auto& c = mesh.tets[t];
    os << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  }
  os << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) os << "10\n";
}

}  // namespace tracefem
