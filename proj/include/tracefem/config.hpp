#pragma once

#include "tracefem/geometry.hpp"
#include "tracefem/verification.hpp"

#include <map>
#include <string>

namespace tracefem {

/// Invalid or inconsistent run configuration.
class ConfigError : public SetupError {
 public:
  using SetupError::SetupError;
};

struct RunConfig {
  std::string case_name = "sphere";  // sphere | plane
  int k = 1;                         // velocity degree
  int l = 1;                         // multiplier degree
  double alpha = 0.0;                // rho = c * h^(1 - alpha)
  double c_alpha = 1.0;
  int level_min = 1;
  int level_max = 4;
  NormalMode normals = NormalMode::interpolated;
  SolverKind solver = SolverKind::minres;
  double rtol = 1e-6;
  double inner_rtol = 1e-4;
  int maxit = 2000;
  int inner_maxit = 20000;
  std::string output_dir = ".";
  bool write_vtk = false;
  bool residual_history = false;

  /// 1 <= l <= k <= 2, alpha in [0, 2], levels within [1, 6], positive tolerances.
  void validate() const;

  /// "h" for alpha = 0, "hinv" for alpha = 2, "1" for alpha = 1, "a<alpha>" otherwise;
  /// a constant c != 1 is appended as "-c<c>".
  std::string rho_tag() const;
  /// e.g. sphereP1-h, planeP2-h (multiplier degree 1 is implied), planeP2P2-h
  std::string file_stem() const;

  DiscretizationOptions discretization(int level) const;

  /// Set one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
};

/// key=value lines; '#' starts a comment, blank lines are ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Parses "a..b", "a-b" or "a".
std::pair<int, int> parse_level_range(const std::string& text);

/// Applies the entries in order, then validates.
RunConfig config_from_map(const std::map<std::string, std::string>& entries,
                          RunConfig base = RunConfig{});

}  // namespace tracefem
