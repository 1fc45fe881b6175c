#include "deltashell/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "deltashell/radial.hpp"
#include "deltashell/resolvent.hpp"
#include "deltashell/schur.hpp"
#include "deltashell/spectral.hpp"

namespace dsh {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void check_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw std::runtime_error("non-finite value in " + what);
}

std::shared_ptr<const Surface> build_surface(const RunConfig& cfg) {
  if (cfg.surface_kind == "sphere")
    return std::make_shared<const Surface>(make_sphere(cfg.radius, cfg.n_theta));
  return std::make_shared<const Surface>(load_mesh(cfg.mesh_path));
}

Eigen::VectorXd lambda_grid_of(const RunConfig& cfg, const PhysParams& p) {
  Eigen::VectorXd grid(cfg.lambda_count);
  const double edge = p.gap_edge();
  if (cfg.lambda_count == 1)
    grid(0) = cfg.lambda_min * edge;
  else
    for (int i = 0; i < cfg.lambda_count; ++i)
      grid(i) = edge * (cfg.lambda_min +
                        (cfg.lambda_max - cfg.lambda_min) * double(i) / (cfg.lambda_count - 1));
  return grid;
}

json params_json(const PhysParams& p, const RunConfig& cfg) {
  return json{{"m", p.m},
              {"c", p.c},
              {"eta", p.eta},
              {"surface", cfg.surface_kind},
              {"radius", cfg.radius},
              {"n_theta", cfg.n_theta}};
}

int run_curves(const RunConfig& cfg, const std::string& out_dir) {
  PhysParams p{cfg.m, cfg.c, cfg.eta.value_or(0.0)};
  auto s = build_surface(cfg);
  SpectralCurve curve = scan_curves(p, s, lambda_grid_of(cfg, p));
  std::ostringstream csv;
  csv << "lambda,branch,mu\n";
  for (Eigen::Index k = 0; k < curve.lambda_grid.size(); ++k) {
    const Eigen::VectorXd& br = curve.branches[size_t(k)];
    for (Eigen::Index b = 0; b < br.size(); ++b) {
      check_finite(br(b), "curves");
      csv << fmt17(curve.lambda_grid(k)) << "," << b << "," << fmt17(br(b)) << "\n";
    }
  }
  write_atomic(out_dir + "/" + cfg.out_curves, csv.str());
  std::cerr << "curves: " << curve.lambda_grid.size() << " grid points, "
            << curve.branches.front().size() << " branches, monotonicity violations "
            << curve.monotonicity_violations << "\n";
  return 0;
}

int run_bound_states(const RunConfig& cfg, const std::string& out_dir) {
  PhysParams p{cfg.m, cfg.c, cfg.eta.value_or(0.0)};
  auto s = build_surface(cfg);
  SpectralCurve curve = scan_curves(p, s, lambda_grid_of(cfg, p));
  FindOptions fopt;
  fopt.residual_tol_scale = cfg.residual_tol_scale;
  fopt.compute_slopes = true;
  std::vector<BoundState> states = find_bound_states(p, s, curve, fopt);

  Eigen::VectorXd m0grid = Eigen::VectorXd::LinSpaced(11, -p.gap_edge(), p.gap_edge());
  M0Estimate m0 = estimate_M0(p, s, m0grid);

  json j;
  j["params"] = params_json(p, cfg);
  j["bound_states"] = json::array();
  for (const auto& bs : states) {
    check_finite(bs.lambda_star, "bound_states");
    j["bound_states"].push_back(json{{"lambda", bs.lambda_star},
                                     {"branch", bs.branch_index},
                                     {"residual", bs.residual},
                                     {"multiplicity", bs.multiplicity_estimate},
                                     {"branch_slope", bs.branch_slope}});
  }
  j["m0_estimate"] = m0.value;
  write_atomic(out_dir + "/" + cfg.out_bound_states, j.dump(2) + "\n");
  std::cerr << "bound-states: " << states.size() << " roots, M0_est " << m0.value << "\n";
  return 0;
}

int run_nonrel(const RunConfig& cfg, const std::string& out_dir) {
  const double eta = cfg.eta.value_or(1.0);
  auto s = build_surface(cfg);
  const Complex lam(cfg.nonrel_lambda_re, cfg.nonrel_lambda_im);
  VolumeGrid grid = make_volume_grid(cfg.box, cfg.cells);
  VolumeField f = [](const Vec3& x) {
    const double gauss = std::exp(-x.squaredNorm() / (1.2 * 1.2));
    return Vec4(gauss, 0.4 * gauss, 0.2 * gauss, -0.3 * gauss);
  };
  Eigen::Matrix<double, Eigen::Dynamic, 3> targets(8, 3);
  targets << 2.6, 0.4, 0.4, 0.4, 2.9, -0.7, -2.2, 1.4, 1.7, 2.8, -2.0, 0.8, 0.2, 0.3, 3.2, -2.5,
      -2.3, 0.4, 2.1, 2.1, 1.7, 3.1, 0.2, -1.9;
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    Eigen::Index best = 0;
    (grid.points.rowwise() - targets.row(t)).rowwise().norm().minCoeff(&best);
    targets.row(t) = grid.points.row(best);
  }

  NonrelResult res = nonrel_limit_experiment(cfg.m, eta, lam, cfg.c_list, s, f, targets, grid);
  std::ostringstream csv;
  csv << "c,deviation_M,deviation_resolvent\n";
  for (const auto& r : res.rows) {
    check_finite(r.deviation_M, "nonrel");
    check_finite(r.deviation_resolvent, "nonrel");
    csv << fmt17(r.c) << "," << fmt17(r.deviation_M) << "," << fmt17(r.deviation_resolvent)
        << "\n";
  }
  write_atomic(out_dir + "/" + cfg.out_nonrel, csv.str());
  std::cerr << "nonrel-limit: slope_M " << res.slope_M << "\n";
  return 0;
}

int run_trace(const RunConfig& cfg, const std::string& out_dir) {
  PhysParams p{cfg.m, cfg.c, cfg.eta.value_or(1.0)};
  auto s = build_surface(cfg);
  TraceCheckReport rep =
      trace_formula_check(p, s, Complex(cfg.trace_lambda_re, cfg.trace_lambda_im));
  json j;
  j["params"] = params_json(p, cfg);
  j["lambda"] = {cfg.trace_lambda_re, cfg.trace_lambda_im};
  j["rhs"] = {rep.rhs.real(), rep.rhs.imag()};
  j["lhs_proxy"] = {rep.lhs_proxy.real(), rep.lhs_proxy.imag()};
  j["relative_gap"] = rep.relative_gap;
  j["condition_estimate"] = rep.condition_estimate;
  write_atomic(out_dir + "/" + cfg.out_trace, j.dump(2) + "\n");
  std::cerr << "trace-check: relative gap " << rep.relative_gap << "\n";
  return 0;
}

// kappa1 fit: max over pairwise displacements of |K(x)|_2 / shape(|x|)
double fit_kappa(const Surface& s, KernelKind kind, const PhysParams& p, Complex lam,
                 const std::function<double(double)>& shape, bool subtract_cauchy) {
  double kappa = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const Vec3 d = Vec3(s.nodes.row(i)) - Vec3(s.nodes.row(j));
      const double r = d.norm();
      Mat4 K = coeffs_to_matrix(kernel_coeffs(kind, p, lam, r), d);
      if (subtract_cauchy)
        K -= Complex(0, 1.0) / (4.0 * M_PI * p.c * r * r * r) * alpha_dot(d);
      const double nrm = K.jacobiSvd().singularValues()(0);
      kappa = std::max(kappa, nrm / shape(r));
    }
  }
  return kappa;
}

int run_certify(const RunConfig& cfg, const std::string& out_dir) {
  PhysParams p{cfg.m, cfg.c, 0.0};
  auto s = build_surface(cfg);
  AssembleOptions excl;
  excl.policy = PvPolicy::DiagonalExclusion;

  json arr = json::array();

  // 1) Schrodinger comparison operator at lambda = -1: fully weakly singular,
  //    |K_lambda(x)| <= 2m/(4 pi) (1 + 1/|x|).
  {
    KernelBoundParams kb;
    kb.kappa1 = 2.0 * cfg.m / (4.0 * M_PI);
    NormCertificate cert = certify_operator_norm(CertKind::SurfToSurf, kb, *s);
    const double measured =
        operator_norm(assemble_M_schrodinger(cfg.m, Complex(-1.0, 0.0), s, excl).matrix);
    arr.push_back(json{{"rule", cert.rule},
                       {"kappa1", cert.kappa1},
                       {"K", cert.K},
                       {"bound", cert.bound},
                       {"measured_norm", measured},
                       {"operator", "M_schrodinger(-1)"}});
  }

  // 2) M(0): bounded part certified via the surf-to-surf rule, the excluded-
  //    diagonal Cauchy part norm-measured and added.
  {
    KernelBoundParams kb;
    kb.kappa1 = fit_kappa(*s, KernelKind::Weyl, p, Complex(0, 0),
                          [](double r) { return 1.0 + 1.0 / r; }, /*subtract_cauchy=*/true);
    NormCertificate cert = certify_operator_norm(CertKind::SurfToSurf, kb, *s);
    // pure Cauchy part, exclusion policy
    const Eigen::Index N = s->size();
    Eigen::MatrixXcd pv(4 * N, 4 * N);
    pv.setZero();
    Eigen::VectorXd sw = s->weights.array().sqrt();
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) {
        if (i == j) continue;
        const Vec3 d = Vec3(s->nodes.row(i)) - Vec3(s->nodes.row(j));
        const double r = d.norm();
        pv.block<4, 4>(4 * i, 4 * j) =
            (sw(i) * sw(j)) * (Complex(0, 1) / (4.0 * M_PI * p.c * r * r * r)) * alpha_dot(d);
      }
    const double pv_norm = operator_norm(pv);
    const double measured = operator_norm(assemble_M(p, Complex(0, 0), s, excl).matrix);
    arr.push_back(json{{"rule", cert.rule},
                       {"kappa1", cert.kappa1},
                       {"K", cert.K},
                       {"bound", cert.bound + pv_norm},
                       {"measured_norm", measured},
                       {"operator", "M(0), bounded part certified + PV part measured"},
                       {"pv_norm", pv_norm}});
  }

  // 3) volume convolution: free resolvent kernel at lambda = 0,
  //    |G_0(x)| <= kappa1 (|x|^-2 near, e^{-kappa2 |x|} far), small grid.
  {
    KernelBoundParams kb;
    kb.R = 1.0;
    kb.kappa2 = 0.5 * cfg.m * cfg.c;  // conservative half decay rate
    kb.kappa1 = 0.0;
    VolumeGrid vg = make_volume_grid(2.5, 10);
    // fit kappa1 over a displacement sample
    for (double r = 0.05; r < 5.0; r *= 1.18) {
      const Vec3 d(r, 0.33 * r, -0.21 * r);
      const double rr = d.norm();
      const double nrm =
          coeffs_to_matrix(kernel_coeffs(KernelKind::Weyl, p, Complex(0, 0), rr), d)
              .jacobiSvd()
              .singularValues()(0);
      const double shape = rr < kb.R ? 1.0 / (rr * rr) : std::exp(-kb.kappa2 * rr);
      kb.kappa1 = std::max(kb.kappa1, nrm / shape);
    }
    NormCertificate cert = certify_operator_norm(CertKind::VolumeConv, kb, *s);
    // measured: plain kernel matrix on the grid (diagonal skipped), power iteration
    const Eigen::Index M = vg.size();
    Eigen::MatrixXcd R0(4 * M, 4 * M);
    R0.setZero();
    for (Eigen::Index i = 0; i < M; ++i)
      for (Eigen::Index j = 0; j < M; ++j) {
        if (i == j) continue;
        const Vec3 d = Vec3(vg.points.row(i)) - Vec3(vg.points.row(j));
        R0.block<4, 4>(4 * i, 4 * j) =
            vg.cell_weight *
            coeffs_to_matrix(kernel_coeffs(KernelKind::Weyl, p, Complex(0, 0), d.norm()), d);
      }
    const double measured = operator_norm(R0);
    arr.push_back(json{{"rule", cert.rule},
                       {"kappa1", cert.kappa1},
                       {"K", cert.K},
                       {"bound", cert.bound},
                       {"measured_norm", measured},
                       {"operator", "free resolvent kernel on a 10^3 grid"}});
  }

  // 4) surf-to-vol: the layer potential gamma(0) from the shell to the grid.
  {
    KernelBoundParams kb;
    kb.R = 1.0;
    kb.kappa2 = 0.5 * cfg.m * cfg.c;
    kb.s = 0.5;
    kb.kappa1 = 0.0;
    for (double r = 0.05; r < 5.0; r *= 1.18) {
      const Vec3 d(0.4 * r, -0.6 * r, 0.7 * r);
      const double rr = d.norm();
      const double nrm =
          coeffs_to_matrix(kernel_coeffs(KernelKind::Weyl, p, Complex(0, 0), rr), d)
              .jacobiSvd()
              .singularValues()(0);
      const double shape = rr < kb.R ? 1.0 / (rr * rr) : std::exp(-kb.kappa2 * rr);
      kb.kappa1 = std::max(kb.kappa1, nrm / shape);
    }
    NormCertificate cert = certify_operator_norm(CertKind::SurfToVol, kb, *s);
    VolumeGrid vg = make_volume_grid(2.5, 10);
    const Eigen::Index M = vg.size(), N = s->size();
    Eigen::MatrixXcd G(4 * M, 4 * N);
    Eigen::VectorXd sw = s->weights.array().sqrt();
    const double swv = std::sqrt(vg.cell_weight);
    for (Eigen::Index i = 0; i < M; ++i)
      for (Eigen::Index j = 0; j < N; ++j) {
        const Vec3 d = Vec3(vg.points.row(i)) - Vec3(s->nodes.row(j));
        G.block<4, 4>(4 * i, 4 * j) =
            (swv * sw(j)) *
            coeffs_to_matrix(kernel_coeffs(KernelKind::Weyl, p, Complex(0, 0), d.norm()), d);
      }
    const double measured = operator_norm(G);
    arr.push_back(json{{"rule", cert.rule},
                       {"kappa1", cert.kappa1},
                       {"K", cert.K},
                       {"bound", cert.bound},
                       {"measured_norm", measured},
                       {"operator", "gamma(0) shell-to-grid"}});
  }

  json j;
  j["certificates"] = arr;
  bool sound = true;
  for (const auto& e : arr)
    if (e["measured_norm"].get<double>() > e["bound"].get<double>()) sound = false;
  j["all_within_bounds"] = sound;
  write_atomic(out_dir + "/" + cfg.out_certificates, j.dump(2) + "\n");
  std::cerr << "certify: " << arr.size() << " certificates, all_within_bounds " << sound << "\n";
  return sound ? 0 : 2;
}

int run_oracle_compare(const RunConfig& cfg, const std::string& out_dir) {
  PhysParams p{cfg.m, cfg.c, cfg.eta.value_or(-1.5)};
  auto s = build_surface(cfg);
  std::vector<RadialRoot> oracle = sphere_bound_states_radial(cfg.radius, p, cfg.kappa_max);
  SpectralCurve curve = scan_curves(p, s, lambda_grid_of(cfg, p));
  FindOptions fopt;
  fopt.residual_tol_scale = cfg.residual_tol_scale;
  std::vector<BoundState> states = find_bound_states(p, s, curve, fopt);

  json pairs = json::array();
  double max_delta = 0.0;
  const double lo = curve.lambda_grid.minCoeff(), hi = curve.lambda_grid.maxCoeff();
  for (const auto& orc : oracle) {
    if (orc.lambda < lo || orc.lambda > hi) continue;
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& bs : states)
      if (std::isnan(best) || std::abs(bs.lambda_star - orc.lambda) < std::abs(best - orc.lambda))
        best = bs.lambda_star;
    const double delta = std::isnan(best) ? std::numeric_limits<double>::infinity()
                                          : std::abs(best - orc.lambda);
    max_delta = std::max(max_delta, delta);
    pairs.push_back(json{{"kappa", orc.kappa},
                         {"degeneracy", orc.degeneracy},
                         {"oracle_lambda", orc.lambda},
                         {"solver_lambda", best},
                         {"delta", delta}});
  }
  json j;
  j["params"] = params_json(p, cfg);
  j["pairs"] = pairs;
  j["max_delta"] = max_delta;
  j["solver_root_count"] = states.size();
  write_atomic(out_dir + "/" + cfg.out_oracle, j.dump(2) + "\n");
  std::cerr << "oracle-compare: max |delta lambda| " << max_delta << "\n";
  return 0;
}

}  // namespace

int run_experiment(const RunConfig& cfg, const std::string& out_dir) {
  const auto diags = validate_config(cfg);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << "config error: " << d << "\n";
    return 1;
  }
  try {
    if (cfg.experiment == "curves") return run_curves(cfg, out_dir);
    if (cfg.experiment == "bound-states") return run_bound_states(cfg, out_dir);
    if (cfg.experiment == "nonrel-limit") return run_nonrel(cfg, out_dir);
    if (cfg.experiment == "trace-check") return run_trace(cfg, out_dir);
    if (cfg.experiment == "certify") return run_certify(cfg, out_dir);
    if (cfg.experiment == "oracle-compare") return run_oracle_compare(cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace dsh
