#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dsh {

/// Flat key-value configuration with dotted sections, e.g.
///   experiment = bound-states
///   physics.m = 1.0
///   surface.kind = sphere
/// Lines starting with '#' are comments; values may be comma-separated lists.
struct RunConfig {
  std::string experiment;  // curves | bound-states | nonrel-limit | trace-check |
                           // certify | oracle-compare

  // physics
  double m = 1.0;
  double c = 1.0;
  std::optional<double> eta;
  std::vector<double> eta_list;

  // surface
  std::string surface_kind = "sphere";  // sphere | mesh
  double radius = 1.0;
  int n_theta = 12;
  std::string mesh_path;

  // lambda grid (fractions of mc^2 unless absolute = true)
  double lambda_min = -0.9;
  double lambda_max = 0.9;
  int lambda_count = 21;

  // nonrel
  std::vector<double> c_list{8.0, 16.0, 32.0, 64.0};
  double nonrel_lambda_re = 0.0;
  double nonrel_lambda_im = 1.0;

  // trace check
  double trace_lambda_re = 0.3;
  double trace_lambda_im = 0.5;

  // resolvent volume grid
  double box = 5.0;
  int cells = 20;

  // oracle comparison
  int kappa_max = 3;
  int refine_n_theta = 0;  // optional second resolution for oracle-compare

  // outputs (file names, relative to out_dir)
  std::string out_curves = "curves.csv";
  std::string out_bound_states = "bound_states.json";
  std::string out_nonrel = "nonrel.csv";
  std::string out_trace = "trace.json";
  std::string out_certificates = "certificates.json";
  std::string out_oracle = "oracle_compare.json";

  // tolerance overrides
  double residual_tol_scale = 1e-8;

  std::map<std::string, std::string> raw;
};

/// Parse a config file. Throws std::runtime_error on I/O or syntax errors.
RunConfig parse_config(const std::string& path);

/// Schema + physical-range diagnostics; empty means OK.
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace dsh
