#pragma once

#include "tracefem/assembly.hpp"
#include "tracefem/linalg.hpp"
#include "tracefem/mesh.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tracefem {

/// Prescribed tangential solution on a level-set surface.
struct ManufacturedCase {
  std::string name;
  LevelSet phi;
  BoundingBox box;
  /// u* at points of Gamma.
  VectorFunction u_exact;
  bool dirichlet = false;
  double fd_step = 1e-5;

  /// Unit sphere, u* = P (-x3^2, x2, x1) in coordinates relative to the center.
  static ManufacturedCase sphere(const Vec3& center = Vec3::Zero());
  /// Tilted plane, u* = (4/17, 1, 16/17) sin(pi x2) sin(pi x3), homogeneous Dirichlet data.
  static ManufacturedCase plane();
  /// Unit sphere with the rotation field (x2, -x1, 0), which has zero surface strain.
  static ManufacturedCase sphere_rotation();
  static ManufacturedCase by_name(const std::string& name);

  /// u* o p, constant along normals.
  Vec3 extended(const Vec3& x) const { return u_exact(phi.closest_point(x)); }
};

/// Gradient of u* o p by central differences; row i is grad of component i.
Mat3 extended_gradient(const ManufacturedCase& mc, const Vec3& x);

/// E_s(u*) = 1/2 P (grad u^e + grad u^e^T) P with the exact extended normal.
Mat3 surface_strain(const ManufacturedCase& mc, const Vec3& x);

/// f = -P div_Gamma(E_s(u*)) + u* at x on Gamma (nested central differences).
Vec3 forcing(const ManufacturedCase& mc, const Vec3& x);

/// lambda = -tr(E_s(u*) H).
double exact_multiplier(const ManufacturedCase& mc, const Vec3& x);

enum class SolverKind { minres, direct };

/// Options of one discretization level.
struct DiscretizationOptions {
  int level = 1;
  int velocity_degree = 1;
  int multiplier_degree = 1;
  double alpha = 0.0;
  double c_alpha = 1.0;
  NormalMode normals = NormalMode::interpolated;
};

/// Mesh, geometry, spaces and assembled system of one level. Members refer
/// to each other, so instances are neither copied nor moved.
class Discretization {
 public:
  Discretization(ManufacturedCase mc, const DiscretizationOptions& opts);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const ManufacturedCase& problem() const { return case_; }
  const DiscretizationOptions& options() const { return opts_; }
  const BackgroundMesh& mesh() const { return mesh_; }
  const ActiveSet& active() const { return active_; }
  const SurfaceMesh& surface() const { return surface_; }
  const NormalField& normals() const { return normals_; }
  const TraceSpace& velocity() const { return velocity_; }
  const TraceSpace& multiplier() const { return multiplier_; }
  const StabilizationParams& params() const { return params_; }
  const SaddleSystem& system() const { return system_; }

 private:
  ManufacturedCase case_;
  DiscretizationOptions opts_;
  BackgroundMesh mesh_;
  ActiveSet active_;
  SurfaceMesh surface_;
  NormalField normals_;
  TraceSpace velocity_;
  TraceSpace multiplier_;
  StabilizationParams params_;
  SaddleSystem system_;
};

struct ErrorRow {
  int level = 0;
  double U = 0.0;    // |u* - u_h|_U
  double L2P = 0.0;  // |u* - P_h u_h|_{L2(Gamma_h)}
  double uN = 0.0;   // |u_h . n_h|_{L2(Gamma_h)}
  double M = 0.0;    // |lambda - lambda_h|_M
};

/// Error norms of a discrete solution (u_h interleaved, lambda_h scalar).
ErrorRow compute_errors(const Discretization& d, const Vector& u_h, const Vector& lambda_h);

/// log2(e_{i-1} / e_i) for consecutive entries.
std::vector<double> convergence_orders(const std::vector<double>& errors);

struct RunConfig;

struct LevelResult {
  int level = 0;
  double h = 0.0;
  int n_velocity = 0;
  int n_multiplier = 0;
  bool ok = false;
  std::string message;  // failure reason
  ErrorRow errors;
  SolverStats stats;
};

struct StudyResult {
  std::vector<LevelResult> levels;

  bool all_ok() const;
  /// Column by name: "U", "L2P", "u_N", "M".
  std::vector<double> column(const std::string& name) const;
  /// Order between the two finest levels.
  double final_order(const std::string& name) const;
};

/// Assemble, solve and measure a single level.
LevelResult run_level(const RunConfig& config, int level, std::ostream* log = nullptr);

/// All levels of the config; failures are recorded per level.
StudyResult run_convergence_study(const RunConfig& config, std::ostream* log = nullptr);

/// Header "level U L2P u_N M"; failed levels are written as nan.
void write_error_table(std::ostream& os, const StudyResult& result);
/// Header "level N_A N_S N".
void write_iteration_table(std::ostream& os, const StudyResult& result);

/// Writes <stem>.dat and <stem>-iters.dat (plus optional VTK and residual
/// histories) to the config's output directory; returns the written paths.
std::vector<std::string> write_outputs(const RunConfig& config, const StudyResult& result);

}  // namespace tracefem
