#include "tracefem/verification.hpp"

#include "tracefem/config.hpp"
#include "tracefem/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

namespace tracefem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec3 tangential(const Vec3& y, const Vec3& w) {
  const Vec3 n = y.normalized();
  return w - n * n.dot(w);
}

}  // namespace

ManufacturedCase ManufacturedCase::sphere(const Vec3& center) {
  ManufacturedCase mc;
  mc.name = "sphere";
  mc.phi = LevelSet::sphere(center, 1.0);
  mc.box = BoundingBox::sphere_case();
  mc.u_exact = [center](const Vec3& x) -> Vec3 {
    const Vec3 y = x - center;
    return tangential(y, Vec3(-y[2] * y[2], y[1], y[0]));
  };
  return mc;
}

ManufacturedCase ManufacturedCase::plane() {
  ManufacturedCase mc;
  mc.name = "plane";
  mc.phi = LevelSet::tilted_plane();
  mc.box = BoundingBox::plane_case();
  mc.u_exact = [](const Vec3& x) -> Vec3 {
    const double s = std::sin(std::numbers::pi * x[1]) * std::sin(std::numbers::pi * x[2]);
    return Vec3(4.0 / 17.0, 1.0, 16.0 / 17.0) * s;
  };
  mc.dirichlet = true;
  return mc;
}

ManufacturedCase ManufacturedCase::sphere_rotation() {
  ManufacturedCase mc = sphere();
  mc.name = "sphere-rotation";
  mc.u_exact = [](const Vec3& x) -> Vec3 { return tangential(x, Vec3(x[1], -x[0], 0.0)); };
  return mc;
}

ManufacturedCase ManufacturedCase::by_name(const std::string& name) {
  if (name == "sphere") return sphere();
  if (name == "plane") return plane();
  if (name == "sphere-rotation") return sphere_rotation();
  throw SetupError("unknown manufactured case '" + name + "'");
}

Mat3 extended_gradient(const ManufacturedCase& mc, const Vec3& x) {
  const double d = mc.fd_step;
  Mat3 g;
  for (int j = 0; j < 3; ++j) {
    const Vec3 e = d * Vec3::Unit(j);
    g.col(j) = (mc.extended(x + e) - mc.extended(x - e)) / (2.0 * d);
  }
  return g;
}

Mat3 surface_strain(const ManufacturedCase& mc, const Vec3& x) {
  const Mat3 g = extended_gradient(mc, x);
  const Vec3 n = mc.phi.normal(x);
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  return 0.5 * P * (g + g.transpose()) * P;
}

Vec3 forcing(const ManufacturedCase& mc, const Vec3& x_in) {
  const Vec3 x = mc.phi.closest_point(x_in);
  const double d = mc.fd_step;
  const Vec3 n = mc.phi.normal(x);
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  // (div_Gamma E)_i = sum_{j,k} P_jk d_k E_ij
  Vec3 div = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = d * Vec3::Unit(k);
    const Mat3 dk = (surface_strain(mc, x + e) - surface_strain(mc, x - e)) / (2.0 * d);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) div[i] += P(j, k) * dk(i, j);
  }
  return -P * div + mc.u_exact(x);
}

double exact_multiplier(const ManufacturedCase& mc, const Vec3& x_in) {
  const Vec3 x = mc.phi.closest_point(x_in);
  return -(surface_strain(mc, x) * mc.phi.shape_operator(x)).trace();
}

Discretization::Discretization(ManufacturedCase mc, const DiscretizationOptions& opts)
    : case_(std::move(mc)),
      opts_(opts),
      mesh_(build_mesh(case_.box, opts.level)),
      active_(select_active(mesh_, case_.phi)),
      surface_(extract_surface(mesh_, active_)),
      normals_(mesh_, case_.phi, opts.normals),
      velocity_(mesh_, active_, opts.velocity_degree,
                case_.dirichlet ? DirichletSpec::faces_cut_by(mesh_, case_.phi) : DirichletSpec::none()),
      multiplier_(mesh_, active_, opts.multiplier_degree,
                  case_.dirichlet ? DirichletSpec::faces_cut_by(mesh_, case_.phi) : DirichletSpec::none()),
      params_(StabilizationParams::from_scaling(mesh_.h, opts.alpha, opts.c_alpha)) {
  const ManufacturedCase* mcp = &case_;
  system_ = assemble_system(velocity_, multiplier_, surface_, normals_, params_,
                            [mcp](const Vec3& x) { return forcing(*mcp, x); });
}

ErrorRow compute_errors(const Discretization& d, const Vector& u_h, const Vector& lambda_h) {
  const TraceSpace& U = d.velocity();
  const TraceSpace& M = d.multiplier();
  const ManufacturedCase& mc = d.problem();
  if (u_h.size() != 3 * U.n_dof() || lambda_h.size() != M.n_dof())
    throw SetupError("solution vectors do not match the spaces");
  const double rho = d.params().rho;
  const int ku = U.degree(), km = M.degree();
  const int nu = U.nodes_per_cell(), nm = M.nodes_per_cell();
  const TriangleRule& trule = triangle_rule_degree4();
  const TetRule& vrule = tet_rule_for_degree(ku);
  const double fd = mc.fd_step;

  double eU = 0.0, eL2P = 0.0, eN = 0.0, eM = 0.0;
  std::array<double, 10> phi, psi;
  std::array<Vec3, 10> gphi, gpsi;

  auto eval = [&](std::size_t c, const TetGeometry& geo, const Eigen::Vector4d& b, Vec3& uh, Mat3& Gh,
                  double& lh, Vec3& glh) {
    shape_values(ku, b, phi);
    shape_gradients(ku, geo, b, gphi);
    shape_values(km, b, psi);
    shape_gradients(km, geo, b, gpsi);
    const int* du = U.cell_dofs(c);
    const int* dm = M.cell_dofs(c);
    uh.setZero();
    Gh.setZero();
    for (int a = 0; a < nu; ++a) {
      const Vec3 coef = u_h.segment<3>(3 * du[a]);
      uh += phi[a] * coef;
      Gh += coef * gphi[a].transpose();
    }
    lh = 0.0;
    glh.setZero();
    for (int j = 0; j < nm; ++j) {
      lh += psi[j] * lambda_h[dm[j]];
      glh += lambda_h[dm[j]] * gpsi[j];
    }
  };

  for (std::size_t c = 0; c < U.n_cells(); ++c) {
    const TetGeometry geo = U.cell_geometry(c);
    const TetNormal tn = d.normals().on_tet(U.cell_tet(c));
    Vec3 uh, glh;
    Mat3 Gh;
    double lh;
    for (const SurfaceTriangle& t : d.surface().in_active(int(c))) {
      for (std::size_t q = 0; q < trule.size(); ++q) {
        const auto& bt = trule.points[q];
        const Vec3 x = bt[0] * t.points[0] + bt[1] * t.points[1] + bt[2] * t.points[2];
        const double w = 2.0 * t.area * trule.weights[q];
        eval(c, geo, geo.barycentric(x), uh, Gh, lh, glh);
        const Vec3 n = tn.normal(x);
        const Mat3 P = Mat3::Identity() - n * n.transpose();
        const Vec3 ue = mc.extended(x);
        const Mat3 Gd = extended_gradient(mc, x) - Gh;
        const Mat3 E = 0.5 * P * (Gd + Gd.transpose()) * P;
        const Vec3 e = ue - uh;
        eU += w * ((E * E).trace() + e.squaredNorm());
        eL2P += w * (ue - P * uh).squaredNorm();
        eN += w * std::pow(uh.dot(n), 2);
        eM += w * std::pow(exact_multiplier(mc, x) - lh, 2);
      }
    }
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      const Eigen::Vector4d& b = vrule.points[q];
      const Vec3 x = geo.point(b);
      const double w = 6.0 * geo.volume() * vrule.weights[q];
      eval(c, geo, b, uh, Gh, lh, glh);
      const Vec3 n = tn.normal(x);
      const Mat3 Gd = extended_gradient(mc, x) - Gh;
      eU += rho * w * (Gd * n).squaredNorm();
      Vec3 gl;
      for (int j = 0; j < 3; ++j) {
        const Vec3 e = fd * Vec3::Unit(j);
        gl[j] = (exact_multiplier(mc, x + e) - exact_multiplier(mc, x - e)) / (2.0 * fd);
      }
      eM += rho * w * std::pow(n.dot(gl - glh), 2);
    }
  }
  ErrorRow row;
  row.level = d.options().level;
  row.U = std::sqrt(eU);
  row.L2P = std::sqrt(eL2P);
  row.uN = std::sqrt(eN);
  row.M = std::sqrt(eM);
  return row;
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t i = 1; i < errors.size(); ++i) orders.push_back(std::log2(errors[i - 1] / errors[i]));
  return orders;
}

bool StudyResult::all_ok() const {
  for (const auto& l : levels)
    if (!l.ok) return false;
  return !levels.empty();
}

std::vector<double> StudyResult::column(const std::string& name) const {
  std::vector<double> out;
  for (const auto& l : levels) {
    if (!l.ok) {
      out.push_back(kNaN);
    } else if (name == "U") {
      out.push_back(l.errors.U);
    } else if (name == "L2P") {
      out.push_back(l.errors.L2P);
    } else if (name == "u_N") {
      out.push_back(l.errors.uN);
    } else if (name == "M") {
      out.push_back(l.errors.M);
    } else {
      throw SetupError("unknown error column '" + name + "'");
    }
  }
  return out;
}

double StudyResult::final_order(const std::string& name) const {
  const auto col = column(name);
  if (col.size() < 2) return kNaN;
  return std::log2(col[col.size() - 2] / col.back());
}

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void write_solution_vtk(const RunConfig& config, const Discretization& d, const Vector& u_h, int level) {
  std::filesystem::create_directories(config.output_dir);
  const FEFunction uh(d.velocity(), 3, u_h);
  std::vector<Vec3> samples;
  samples.reserve(3 * d.surface().triangles.size());
  for (const auto& t : d.surface().triangles)
    for (const auto& p : t.points) samples.push_back(uh.value(std::size_t(t.active), p));
  const std::string path = join_path(config.output_dir, config.file_stem() + "-l" + std::to_string(level) + ".vtk");
  std::ofstream os(path);
  if (!os) throw SetupError("cannot write " + path);
  write_vtk(os, d.surface(), samples, "u_h");
}

}  // namespace

LevelResult run_level(const RunConfig& config, int level, std::ostream* log) {
  LevelResult r;
  r.level = level;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Discretization d(ManufacturedCase::by_name(config.case_name), config.discretization(level));
    r.h = d.mesh().h;
    r.n_velocity = d.system().n_velocity();
    r.n_multiplier = d.system().n_multiplier();
    SaddleSolution sol;
    if (config.solver == SolverKind::minres) {
      BlockPreconditioner Q(d.system(), config.inner_rtol, config.inner_maxit);
      sol = minres(d.system(), Q, config.rtol, config.maxit);
    } else {
      sol = direct_solve(d.system());
    }
    r.stats = sol.stats;
    r.errors = compute_errors(d, sol.u, sol.lambda);
    if (config.write_vtk) write_solution_vtk(config, d, sol.u, level);
    r.ok = sol.stats.converged;
    if (!r.ok) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "MINRES stopped after %d iterations at relative residual %.3e",
                    sol.stats.iterations, sol.stats.relative_residual);
      r.message = buf;
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.message = e.what();
  }
  if (log) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    if (r.ok)
      std::snprintf(buf, sizeof buf,
                    "level %d: h=%.4g dofs=%d+%d N=%d N_A=%.1f N_S=%.1f U=%.3e L2P=%.3e u_N=%.3e M=%.3e (%.1fs)\n",
                    level, r.h, r.n_velocity, r.n_multiplier, r.stats.iterations, r.stats.inner_A,
                    r.stats.inner_S, r.errors.U, r.errors.L2P, r.errors.uN, r.errors.M, secs);
    else
      std::snprintf(buf, sizeof buf, "level %d: FAILED: %s (%.1fs)\n", level, r.message.c_str(), secs);
    *log << buf << std::flush;
  }
  return r;
}

StudyResult run_convergence_study(const RunConfig& config, std::ostream* log) {
  config.validate();
  StudyResult result;
  for (int level = config.level_min; level <= config.level_max; ++level)
    result.levels.push_back(run_level(config, level, log));
  return result;
}

void write_error_table(std::ostream& os, const StudyResult& result) {
  os << "level U L2P u_N M\n";
  char buf[160];
  for (const auto& l : result.levels) {
    if (l.ok)
      std::snprintf(buf, sizeof buf, "%d %.5e %.5e %.5e %.5e\n", l.level, l.errors.U, l.errors.L2P,
                    l.errors.uN, l.errors.M);
    else
      std::snprintf(buf, sizeof buf, "%d nan nan nan nan\n", l.level);
    os << buf;
  }
}

void write_iteration_table(std::ostream& os, const StudyResult& result) {
  os << "level N_A N_S N\n";
  char buf[160];
  for (const auto& l : result.levels) {
    if (l.ok && l.stats.iterations > 0)
      std::snprintf(buf, sizeof buf, "%d %.5e %.5e %d\n", l.level, l.stats.inner_A, l.stats.inner_S,
                    l.stats.iterations);
    else
      std::snprintf(buf, sizeof buf, "%d nan nan nan\n", l.level);
    os << buf;
  }
}

std::vector<std::string> write_outputs(const RunConfig& config, const StudyResult& result) {
  std::filesystem::create_directories(config.output_dir);
  std::vector<std::string> paths;
  auto open = [&](const std::string& name) {
    paths.push_back(join_path(config.output_dir, name));
    std::ofstream os(paths.back());
    if (!os) throw SetupError("cannot write " + paths.back());
    return os;
  };
  {
    auto os = open(config.file_stem() + ".dat");
    write_error_table(os, result);
  }
  {
    auto os = open(config.file_stem() + "-iters.dat");
    write_iteration_table(os, result);
  }
  if (config.residual_history) {
    for (const auto& l : result.levels) {
      if (l.stats.residual_history.empty()) continue;
      auto os = open(config.file_stem() + "-l" + std::to_string(l.level) + "-residuals.dat");
      write_residual_history(os, l.stats);
    }
  }
  return paths;
}

}  // namespace tracefem
