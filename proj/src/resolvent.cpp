#include "deltashell/resolvent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deltashell/spectral.hpp"

namespace dsh {

namespace {

constexpr double kPi = std::numbers::pi;

void gauss01(int g, std::vector<double>& x, std::vector<double>& w) {
  x.assign(g, 0.0);
  w.assign(g, 0.0);
  for (int i = 0; i < (g + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (g + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < g; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = g * (z * p0 - p1) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 - z);
    x[g - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[g - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
}

Vec3 sphere_point(double a, double th, double ph) {
  const double st = std::sin(th);
  return Vec3(a * st * std::cos(ph), a * st * std::sin(ph), a * std::cos(th));
}

// product-integrated gamma for one target over all surface cells
Vec4 gamma_product_integrated(const PhysParams& p, Complex lam, const Surface& s,
                              const SurfaceDensity& phi, const Vec3& t, KernelKind kind) {
  const SphereGrid& g = *s.grid;
  const double a = g.radius, dth = g.dtheta(), dph = g.dphi();
  static thread_local std::vector<double> gx, gw;
  if (gx.empty()) gauss01(6, gx, gw);
  Vec4 acc = Vec4::Zero();
  for (int it = 0; it < g.n_theta; ++it) {
    for (int ip = 0; ip < g.n_phi; ++ip) {
      const Eigen::Index j = Eigen::Index(it) * g.n_phi + ip;
      const Vec4 ph_j = phi.row(j).transpose();
      for (size_t u = 0; u < gx.size(); ++u) {
        const double th = g.theta[it] + dth * (gx[u] - 0.5);
        const double wth = gw[u] * dth;
        for (size_t v = 0; v < gx.size(); ++v) {
          const double pph = g.phi[ip] + dph * (gx[v] - 0.5);
          const double dsig = wth * gw[v] * dph * a * a * std::sin(th);
          const Vec3 d = t - sphere_point(a, th, pph);
          Vec4 tmp = Vec4::Zero();
          apply_coeffs(kernel_coeffs(kind, p, lam, d.norm()), d, ph_j, tmp);
          acc += dsig * tmp;
        }
      }
    }
  }
  return acc;
}

}  // namespace

Eigen::MatrixX4cd apply_gamma(const PhysParams& p, Complex lam, const Surface& s,
                              const SurfaceDensity& phi,
                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                              KernelKind kind, bool allow_near) {
  if (phi.rows() != s.size()) throw std::invalid_argument("apply_gamma: density size mismatch");
  const double h_min = s.mean_spacing();
  Eigen::MatrixX4cd out(targets.rows(), 4);
  out.setZero();
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    const Vec3 xt = targets.row(t);
    // distance to the shell: for spheres use |r - a|, otherwise min node distance
    double dist;
    if (s.grid.has_value())
      dist = std::abs(xt.norm() - s.grid->radius);
    else {
      dist = std::numeric_limits<double>::max();
      for (Eigen::Index j = 0; j < s.size(); ++j)
        dist = std::min(dist, (xt - Vec3(s.nodes.row(j))).norm());
    }
    if (dist < h_min) {
      if (!allow_near)
        throw std::runtime_error("apply_gamma: target closer to Sigma than h_min (near-singular)");
      if (s.grid.has_value() && dist < 2.5 * h_min) {
        out.row(t) = gamma_product_integrated(p, lam, s, phi, xt, kind).transpose();
        continue;
      }
    } else if (allow_near && s.grid.has_value() && dist < 2.5 * h_min) {
      out.row(t) = gamma_product_integrated(p, lam, s, phi, xt, kind).transpose();
      continue;
    }
    Vec4 acc = Vec4::Zero();
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      const Vec3 d = xt - Vec3(s.nodes.row(j));
      const Vec4 pj = s.weights(j) * phi.row(j).transpose();
      apply_coeffs(kernel_coeffs(kind, p, lam, d.norm()), d, pj, acc);
    }
    out.row(t) = acc.transpose();
  }
  return out;
}

SurfaceDensity apply_gamma_star(const PhysParams& p, Complex mu, const Surface& s,
                                const Eigen::MatrixX4cd& f_vals, const VolumeGrid& g,
                                KernelKind kind, int rings) {
  if (g.size() == 0) throw std::invalid_argument("apply_gamma_star: empty grid");
  if (f_vals.rows() != g.size())
    throw std::invalid_argument("apply_gamma_star: field size mismatch");
  // kernel of gamma(mu)^* is G_{conj mu}
  return volume_convolve(kind, p, std::conj(mu), f_vals, g, s.nodes, rings);
}

Eigen::MatrixX4cd free_resolvent_apply(const PhysParams& p, Complex lam, const VolumeField& f,
                                       const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                       const VolumeGrid& g, KernelKind kind, int rings) {
  if (kind == KernelKind::Weyl && !in_resolvent_set(p, lam))
    throw std::domain_error("free_resolvent_apply: lambda not in rho(A_0)");
  Eigen::MatrixX4cd fv = sample_field(f, g);
  return volume_convolve(kind, p, lam, fv, g, targets, rings);
}

namespace {

Eigen::MatrixX4cd krein_apply(const PhysParams& p, Complex lam, const VolumeField& f,
                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                              const VolumeGrid& g, const Surface& s, KernelKind kind,
                              const AssembleOptions& aopt, double cond_guard) {
  Eigen::MatrixX4cd fv = sample_field(f, g);
  Eigen::MatrixX4cd free = volume_convolve(kind, p, lam, fv, g, targets, 3);
  const double eta = p.eta;
  if (eta == 0.0) return free;
  if (p.eta_excluded()) throw std::invalid_argument("resolvent: eta = +-2c excluded");

  auto sp = std::make_shared<const Surface>(s);
  Eigen::MatrixXcd M;
  switch (kind) {
    case KernelKind::Weyl:
      M = assemble_M(p, lam, sp, aopt).matrix;
      break;
    case KernelKind::Shifted:
      M = assemble_M_shifted(p, lam, sp, aopt).matrix;
      break;
    case KernelKind::Schrodinger:
      M = assemble_M_schrodinger(p.m, lam, sp, aopt).matrix;
      break;
    default:
      throw std::invalid_argument("resolvent: unsupported kernel kind");
  }
  const Eigen::Index dim = M.rows();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(dim, dim) + eta * M;
  const double cond = condition_estimate(A);
  if (cond > cond_guard)
    throw std::runtime_error("resolvent: I + eta M ill-conditioned (cond ~ " +
                             std::to_string(cond) + ")");

  // gamma(conj lam)^* has kernel G_lam
  SurfaceDensity gs = apply_gamma_star(p, std::conj(lam), s, fv, g, kind);

  Eigen::VectorXd sw = s.weights.array().sqrt();
  Eigen::VectorXcd rhs(dim);
  for (Eigen::Index j = 0; j < s.size(); ++j)
    rhs.segment<4>(4 * j) = (eta * sw(j)) * gs.row(j).transpose();
  Eigen::VectorXcd sol = A.partialPivLu().solve(rhs);
  SurfaceDensity psi(s.size(), 4);
  for (Eigen::Index j = 0; j < s.size(); ++j)
    psi.row(j) = (sol.segment<4>(4 * j) / sw(j)).transpose();

  Eigen::MatrixX4cd corr = apply_gamma(p, lam, s, psi, targets, kind, /*allow_near=*/true);
  return free - corr;
}

}  // namespace

Eigen::MatrixX4cd dirac_resolvent_apply(const ResolventRequest& req, const Surface& s) {
  if (req.kind == KernelKind::Weyl && is_real(req.lambda))
    throw std::domain_error("dirac_resolvent_apply: lambda must be non-real");
  return krein_apply(req.p, req.lambda, req.f, req.targets, req.grid, s, req.kind, req.assemble,
                     req.condition_guard);
}

Eigen::MatrixX4cd schrodinger_resolvent_apply(double m, double eta, Complex lam,
                                              const VolumeField& f,
                                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                              const VolumeGrid& g, const Surface& s,
                                              const AssembleOptions& opt) {
  if (is_real(lam)) throw std::domain_error("schrodinger_resolvent_apply: lambda must be non-real");
  PhysParams p{m, 1.0, eta};
  // project the data onto the upper components
  VolumeField fp = [f](const Vec3& x) {
    Vec4 v = f(x);
    v(2) = v(3) = 0.0;
    return v;
  };
  return krein_apply(p, lam, fp, targets, g, s, KernelKind::Schrodinger, opt, 1e12);
}

NonrelResult nonrel_limit_experiment(double m, double eta, Complex lam,
                                     const std::vector<double>& c_list,
                                     std::shared_ptr<const Surface> s, const VolumeField& f,
                                     const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                     const VolumeGrid& g, const AssembleOptions& opt) {
  if (is_real(lam)) throw std::domain_error("nonrel_limit_experiment: lambda must be non-real");
  NonrelResult out;
  Eigen::MatrixX4cd u_schro =
      schrodinger_resolvent_apply(m, eta, lam, f, targets, g, *s, opt);
  Eigen::MatrixXcd Mtilde = assemble_M_schrodinger(m, lam, s, opt).matrix;

  for (double c : c_list) {
    PhysParams p{m, c, eta};
    if (p.eta_excluded()) throw std::invalid_argument("nonrel_limit_experiment: eta = +-2c");
    NonrelRow row;
    row.c = c;
    Eigen::MatrixXcd Mshift = assemble_M_shifted(p, lam, s, opt).matrix;
    row.deviation_M = operator_norm(Mshift - Mtilde);

    ResolventRequest req;
    req.p = p;
    req.lambda = lam;
    req.f = f;
    req.targets = targets;
    req.grid = g;
    req.kind = KernelKind::Shifted;
    req.assemble = opt;
    Eigen::MatrixX4cd u_dirac = dirac_resolvent_apply(req, *s);
    row.deviation_resolvent = (u_dirac - u_schro).rowwise().norm().maxCoeff();
    out.rows.push_back(row);
  }
  // log-log slope fit of deviation_M vs c
  const int n = int(out.rows.size());
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : out.rows) {
      const double x = std::log(r.c), y = std::log(r.deviation_M);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.slope_M = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

}  // namespace dsh
