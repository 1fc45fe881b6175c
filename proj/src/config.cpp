#include "deltashell/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <sys/stat.h>

namespace dsh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

bool file_exists(const std::string& path) {
  struct stat st {};
  return ::stat(path.c_str(), &st) == 0;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    cfg.raw[key] = val;
  }

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = cfg.raw.find(k);
    if (it == cfg.raw.end()) return std::nullopt;
    return it->second;
  };
  auto getd = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = std::stod(*v);
  };
  auto geti = [&](const std::string& k, int& dst) {
    if (auto v = get(k)) dst = std::stoi(*v);
  };
  auto gets = [&](const std::string& k, std::string& dst) {
    if (auto v = get(k)) dst = *v;
  };

  gets("experiment", cfg.experiment);
  getd("physics.m", cfg.m);
  getd("physics.c", cfg.c);
  if (auto v = get("physics.eta")) cfg.eta = std::stod(*v);
  if (auto v = get("physics.eta_list")) cfg.eta_list = parse_list(*v);
  gets("surface.kind", cfg.surface_kind);
  getd("surface.radius", cfg.radius);
  geti("surface.n_theta", cfg.n_theta);
  gets("surface.mesh_path", cfg.mesh_path);
  getd("lambda_grid.min", cfg.lambda_min);
  getd("lambda_grid.max", cfg.lambda_max);
  geti("lambda_grid.count", cfg.lambda_count);
  if (auto v = get("nonrel.c_list")) cfg.c_list = parse_list(*v);
  getd("nonrel.lambda_re", cfg.nonrel_lambda_re);
  getd("nonrel.lambda_im", cfg.nonrel_lambda_im);
  getd("trace.lambda_re", cfg.trace_lambda_re);
  getd("trace.lambda_im", cfg.trace_lambda_im);
  getd("resolvent.box", cfg.box);
  geti("resolvent.cells", cfg.cells);
  geti("oracle.kappa_max", cfg.kappa_max);
  geti("oracle.refine_n_theta", cfg.refine_n_theta);
  gets("output.curves", cfg.out_curves);
  gets("output.bound_states", cfg.out_bound_states);
  gets("output.nonrel", cfg.out_nonrel);
  gets("output.trace", cfg.out_trace);
  gets("output.certificates", cfg.out_certificates);
  gets("output.oracle", cfg.out_oracle);
  getd("tolerances.residual_scale", cfg.residual_tol_scale);
  return cfg;
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> diags;
  static const std::vector<std::string> kExperiments{"curves",      "bound-states",
                                                     "nonrel-limit", "trace-check",
                                                     "certify",     "oracle-compare"};
  if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
    diags.push_back("experiment must be one of curves|bound-states|nonrel-limit|trace-check|"
                    "certify|oracle-compare (got '" + cfg.experiment + "')");
  if (!(cfg.m > 0.0)) diags.push_back("physics.m must be > 0");
  if (!(cfg.c > 0.0)) diags.push_back("physics.c must be > 0");

  auto check_eta = [&](double eta) {
    if (std::abs(std::abs(eta) - 2.0 * cfg.c) <= 1e-14 * std::max(1.0, 2.0 * cfg.c))
      diags.push_back("excluded coupling eta=+-2c (eta in R \\ {+-2c})");
  };
  if (cfg.eta) check_eta(*cfg.eta);
  for (double e : cfg.eta_list) check_eta(e);

  if (cfg.surface_kind == "sphere") {
    if (!(cfg.radius > 0.0)) diags.push_back("surface.radius must be > 0");
    if (cfg.n_theta < 4) diags.push_back("surface.n_theta must be >= 4");
  } else if (cfg.surface_kind == "mesh") {
    if (cfg.mesh_path.empty())
      diags.push_back("surface.mesh_path required for mesh surfaces");
    else if (!file_exists(cfg.mesh_path))
      diags.push_back("surface.mesh_path does not exist: " + cfg.mesh_path);
  } else {
    diags.push_back("surface.kind must be sphere or mesh");
  }

  if (cfg.lambda_count < 1) diags.push_back("lambda_grid.count must be >= 1");
  if (cfg.lambda_min > cfg.lambda_max) diags.push_back("lambda_grid.min > lambda_grid.max");
  if (std::abs(cfg.lambda_min) > 1.0 || std::abs(cfg.lambda_max) > 1.0)
    diags.push_back("lambda grid endpoint outside spectral gap (units of mc^2: need [-1, 1])");

  if (cfg.experiment == "nonrel-limit") {
    if (cfg.c_list.empty()) diags.push_back("nonrel.c_list must be non-empty");
    if (cfg.nonrel_lambda_im == 0.0) diags.push_back("nonrel lambda must be non-real");
  }
  if (cfg.experiment == "trace-check" && cfg.trace_lambda_im == 0.0)
    diags.push_back("trace-check lambda must be non-real");
  if ((cfg.experiment == "bound-states" || cfg.experiment == "oracle-compare") && !cfg.eta &&
      cfg.eta_list.empty())
    diags.push_back("physics.eta (or eta_list) required for this experiment");
  return diags;
}

}  // namespace dsh
