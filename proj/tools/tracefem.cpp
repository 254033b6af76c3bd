// Command-line front end: convergence studies and diagnostics.

#include "tracefem/config.hpp"
#include "tracefem/linalg.hpp"
#include "tracefem/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace tracefem;

namespace {

struct Overrides {
  std::vector<std::string> tokens;  // [config file] key=value ...
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App* app, Overrides& o) {
  app->add_option("config", o.tokens, "Optional config file followed by key=value overrides");
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(name, [&o, key](const std::string& v) { o.flags[key] = v; }, help);
  };
  flag("--case", "case", "sphere | plane");
  flag("--k", "k", "velocity degree");
  flag("--l", "l", "multiplier degree");
  flag("--alpha", "alpha", "rho = c h^(1-alpha), alpha in [0,2]");
  flag("--c", "c", "constant c in rho = c h^(1-alpha)");
  flag("--levels", "levels", "level range, e.g. 1..4");
  flag("--normals", "normals", "exact | interpolated");
  flag("--solver", "solver", "minres | direct");
  flag("--rtol", "rtol", "outer MINRES tolerance");
  flag("--inner-rtol", "inner_rtol", "inner PCG tolerance");
  flag("--maxit", "maxit", "outer iteration limit");
  flag("--inner-maxit", "inner_maxit", "inner iteration limit");
  flag("--output-dir", "output_dir", "output directory (also TRACEFEM_OUTPUT_DIR)");
  app->add_flag_callback("--vtk", [&o] { o.flags["vtk"] = "true"; }, "write VTK of Gamma_h with u_h");
  app->add_flag_callback("--residuals", [&o] { o.flags["residuals"] = "true"; },
                         "write MINRES residual histories");
}

// Precedence, lowest first: config file, TRACEFEM_OUTPUT_DIR, key=value tokens, flags.
RunConfig resolve(const Overrides& o) {
  RunConfig cfg;
  std::size_t first = 0;
  if (!o.tokens.empty() && o.tokens[0].find('=') == std::string::npos) {
    std::ifstream in(o.tokens[0]);
    if (!in) throw ConfigError("cannot read config file '" + o.tokens[0] + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_key_values(ss.str())) cfg.set(k, v);
    first = 1;
  }
  if (const char* env = std::getenv("TRACEFEM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  for (std::size_t i = first; i < o.tokens.size(); ++i) {
    const auto eq = o.tokens[i].find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + o.tokens[i] + "'");
    cfg.set(o.tokens[i].substr(0, eq), o.tokens[i].substr(eq + 1));
  }
  for (const auto& [k, v] : o.flags) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

int cmd_run(const RunConfig& cfg) {
  const StudyResult result = run_convergence_study(cfg, &std::cerr);
  for (const auto& path : write_outputs(cfg, result)) std::cout << "wrote " << path << '\n';
  if (result.levels.size() >= 2 && result.all_ok()) {
    for (const char* col : {"U", "L2P", "u_N", "M"})
      std::printf("order %-4s %.3f\n", col, result.final_order(col));
  }
  if (!result.all_ok()) {
    std::cerr << "failed levels:\n";
    for (const auto& l : result.levels)
      if (!l.ok) std::cerr << "  level " << l.level << ": " << l.message << '\n';
    return 1;
  }
  return 0;
}

int cmd_condition(const RunConfig& cfg, const std::string& mode, int dense_limit) {
  const PrecondMode pm = mode == "none" ? PrecondMode::none : PrecondMode::mass_block;
  std::printf("level lambda_min_abs lambda_max_abs cond method\n");
  for (int level = cfg.level_min; level <= cfg.level_max; ++level) {
    const Discretization d(ManufacturedCase::by_name(cfg.case_name), cfg.discretization(level));
    const ConditionEstimate est = estimate_condition(d.system(), pm, dense_limit);
    std::printf("%d %.5e %.5e %.5e %s%s\n", level, est.lambda_min_abs, est.lambda_max_abs, est.cond,
                est.method.c_str(), est.bound_only ? " (bound)" : "");
  }
  return 0;
}

int cmd_schur(const RunConfig& cfg) {
  std::printf("level min max\n");
  for (int level = cfg.level_min; level <= cfg.level_max; ++level) {
    const Discretization d(ManufacturedCase::by_name(cfg.case_name), cfg.discretization(level));
    const SchurSpectrum s = schur_spectrum(d.system());
    std::printf("%d %.5e %.5e\n", level, s.min, s.max);
  }
  return 0;
}

int cmd_mesh_dump(const RunConfig& cfg, bool matrices) {
  std::filesystem::create_directories(cfg.output_dir);
  for (int level = cfg.level_min; level <= cfg.level_max; ++level) {
    const Discretization d(ManufacturedCase::by_name(cfg.case_name), cfg.discretization(level));
    const std::string stem =
        (std::filesystem::path(cfg.output_dir) / (cfg.file_stem() + "-l" + std::to_string(level))).string();
    {
      std::ofstream os(stem + "-band.vtk");
      write_vtk(os, d.mesh(), d.active().tets);
    }
    {
      std::ofstream os(stem + "-surface.vtk");
      write_vtk(os, d.surface());
    }
    std::cout << "wrote " << stem << "-band.vtk, " << stem << "-surface.vtk\n";
    if (matrices) {
      const SaddleSystem& s = d.system();
      const std::pair<const char*, const SparseMatrix*> mats[] = {
          {"A", &s.A}, {"B", &s.B}, {"SM", &s.SM}, {"Mu", &s.Mu}, {"Mlambda", &s.Mlambda}};
      for (const auto& [name, m] : mats) {
        std::ofstream os(stem + "-" + name + ".mtx");
        m->write_matrix_market(os);
      }
      std::cout << "wrote matrices " << stem << "-{A,B,SM,Mu,Mlambda}.mtx\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace finite elements for the surface vector-Laplace problem"};
  app.require_subcommand(1);

  Overrides run_o, cond_o, schur_o, dump_o;
  CLI::App* run = app.add_subcommand("run", "Convergence study: writes <stem>.dat and <stem>-iters.dat");
  add_config_options(run, run_o);

  CLI::App* cond = app.add_subcommand("condition", "Spectral condition number of the saddle matrix");
  add_config_options(cond, cond_o);
  std::string mode = "mass-block";
  int dense_limit = 3500;
  cond->add_option("--mode", mode, "none | mass-block")->check(CLI::IsMember({"none", "mass-block"}));
  cond->add_option("--dense-limit", dense_limit, "largest size handled by a dense eigensolve");

  CLI::App* schur = app.add_subcommand("schur", "Eigenvalue interval of S = B A^-1 B^T against S_M");
  add_config_options(schur, schur_o);

  CLI::App* dump = app.add_subcommand("mesh-dump", "VTK of the active band and Gamma_h");
  add_config_options(dump, dump_o);
  bool matrices = false;
  dump->add_flag("--matrices", matrices, "also write the assembled blocks as MatrixMarket");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(resolve(run_o));
    if (*cond) return cmd_condition(resolve(cond_o), mode, dense_limit);
    if (*schur) return cmd_schur(resolve(schur_o));
    if (*dump) return cmd_mesh_dump(resolve(dump_o), matrices);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
