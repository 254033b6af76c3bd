#include "tracefem/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tracefem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(x)) throw ConfigError("invalid number for " + key + ": '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  int x = 0;
  try {
    x = std::stoi(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("invalid integer for " + key + ": '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (case_name != "sphere" && case_name != "plane")
    throw ConfigError("case must be 'sphere' or 'plane', got '" + case_name + "'");
  if (!(1 <= l && l <= k && k <= 2))
    throw ConfigError("degrees must satisfy 1 <= l <= k <= 2 (k=" + std::to_string(k) +
                      ", l=" + std::to_string(l) + ")");
  if (!(alpha >= 0.0 && alpha <= 2.0)) throw ConfigError("alpha must lie in [0, 2]");
  if (!(c_alpha > 0.0)) throw ConfigError("c must be positive");
  if (!(1 <= level_min && level_min <= level_max && level_max <= 6))
    throw ConfigError("levels must form a range within [1, 6]");
  if (!(rtol > 0.0 && rtol < 1.0)) throw ConfigError("rtol must lie in (0, 1)");
  if (!(inner_rtol > 0.0 && inner_rtol < 1.0)) throw ConfigError("inner_rtol must lie in (0, 1)");
  if (maxit < 1 || inner_maxit < 1) throw ConfigError("iteration limits must be positive");
  if (output_dir.empty()) throw ConfigError("output directory must not be empty");
}

std::string RunConfig::rho_tag() const {
  std::string tag;
  if (alpha == 0.0)
    tag = "h";
  else if (alpha == 2.0)
    tag = "hinv";
  else if (alpha == 1.0)
    tag = "1";
  else
    tag = "a" + short_number(alpha);
  if (c_alpha != 1.0) tag += "-c" + short_number(c_alpha);
  return tag;
}

std::string RunConfig::file_stem() const {
  return case_name + "P" + std::to_string(k) + (l != 1 ? "P" + std::to_string(l) : "") + "-" + rho_tag();
}

DiscretizationOptions RunConfig::discretization(int level) const {
  DiscretizationOptions o;
  o.level = level;
  o.velocity_degree = k;
  o.multiplier_degree = l;
  o.alpha = alpha;
  o.c_alpha = c_alpha;
  o.normals = normals;
  return o;
}

void RunConfig::set(const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), v = trim(value_in);
  if (key == "case") {
    case_name = v;
  } else if (key == "k") {
    k = to_int(key, v);
  } else if (key == "l") {
    l = to_int(key, v);
  } else if (key == "alpha") {
    alpha = to_double(key, v);
  } else if (key == "c") {
    c_alpha = to_double(key, v);
  } else if (key == "levels") {
    std::tie(level_min, level_max) = parse_level_range(v);
  } else if (key == "normals") {
    if (v == "exact")
      normals = NormalMode::exact;
    else if (v == "interpolated")
      normals = NormalMode::interpolated;
    else
      throw ConfigError("normals must be 'exact' or 'interpolated', got '" + v + "'");
  } else if (key == "solver") {
    if (v == "minres")
      solver = SolverKind::minres;
    else if (v == "direct")
      solver = SolverKind::direct;
    else
      throw ConfigError("solver must be 'minres' or 'direct', got '" + v + "'");
  } else if (key == "rtol") {
    rtol = to_double(key, v);
  } else if (key == "inner_rtol") {
    inner_rtol = to_double(key, v);
  } else if (key == "maxit") {
    maxit = to_int(key, v);
  } else if (key == "inner_maxit") {
    inner_maxit = to_int(key, v);
  } else if (key == "output_dir") {
    output_dir = v;
  } else if (key == "vtk") {
    write_vtk = to_bool(key, v);
  } else if (key == "residuals") {
    residual_history = to_bool(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::pair<int, int> parse_level_range(const std::string& text) {
  const std::string t = trim(text);
  std::size_t sep = t.find("..");
  std::size_t len = 2;
  if (sep == std::string::npos) {
    sep = t.find('-', 1);
    len = 1;
  }
  if (sep == std::string::npos) {
    const int l = to_int("levels", t);
    return {l, l};
  }
  return {to_int("levels", trim(t.substr(0, sep))), to_int("levels", trim(t.substr(sep + len)))};
}

RunConfig config_from_map(const std::map<std::string, std::string>& entries, RunConfig base) {
  for (const auto& [key, value] : entries) base.set(key, value);
  base.validate();
  return base;
}

}  // namespace tracefem
