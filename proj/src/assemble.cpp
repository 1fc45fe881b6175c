#include "deltashell/assemble.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dsh {

namespace {

constexpr double kPi = std::numbers::pi;

void gauss_legendre(int g, std::vector<double>& x, std::vector<double>& w) {
  // Newton on Legendre polynomials; nodes on (-1,1).
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
    x[i] = -z;
    x[g - 1 - i] = z;
    w[i] = w[g - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

inline Vec3 sphere_point(double a, double th, double ph) {
  const double st = std::sin(th);
  return Vec3(a * st * std::cos(ph), a * st * std::sin(ph), a * std::cos(th));
}

bool hermitian_case(KernelKind kind, Complex lam) {
  switch (kind) {
    case KernelKind::Weyl:
    case KernelKind::WeylDerivative:
      return is_real(lam);
    case KernelKind::EndpointPlus:
    case KernelKind::EndpointMinus:
      return true;
    case KernelKind::Schrodinger:
      return is_real(lam) && lam.real() < 0.0;  // real kernel
    default:
      return false;  // Shifted is used at non-real lambda
  }
}

struct NearAccumulator {
  // accumulated 4x4 blocks per column index for one row
  std::map<Eigen::Index, Mat4> acc;
  void add(Eigen::Index col, const Mat4& b) {
    auto it = acc.find(col);
    if (it == acc.end())
      acc.emplace(col, b);
    else
      it->second += b;
  }
};

// Integrates the kernel and its P1 parameter moments over the (theta,phi)
// cell of column node j, seen from node x_i. Returns M0, Mt, Mp.
void cell_moments(KernelKind kind, const PhysParams& p, Complex lam, const SphereGrid& g,
                  const Vec3& xi, int jt, int jp, int gauss, const std::vector<double>& gx,
                  const std::vector<double>& gw, Mat4& M0, Mat4& Mt, Mat4& Mp) {
  const double a = g.radius, dth = g.dtheta(), dph = g.dphi();
  M0.setZero();
  Mt.setZero();
  Mp.setZero();
  for (int u = 0; u < gauss; ++u) {
    const double th = g.theta[jt] + 0.5 * dth * gx[u];
    const double wth = 0.5 * gw[u] * dth;
    for (int v = 0; v < gauss; ++v) {
      const double ph = g.phi[jp] + 0.5 * dph * gx[v];
      const double dsig = wth * (0.5 * gw[v] * dph) * a * a * std::sin(th);
      const Vec3 y = sphere_point(a, th, ph);
      const Vec3 d = xi - y;
      const Mat4 K = coeffs_to_matrix(kernel_coeffs(kind, p, lam, d.norm()), d);
      M0 += dsig * K;
      Mt += (dsig * (th - g.theta[jt])) * K;
      Mp += (dsig * (ph - g.phi[jp])) * K;
    }
  }
}

// Own-cell principal value with P1 moments: paired-quadrant Duffy so the
// odd part of the kernel cancels pointwise between mirror points.
void self_cell_moments(KernelKind kind, const PhysParams& p, Complex lam, const SphereGrid& g,
                       int it, int ip, int gauss, const std::vector<double>& gx01,
                       const std::vector<double>& gw01, Mat4& M0, Mat4& Mt, Mat4& Mp) {
  const double a = g.radius;
  const double A = 0.5 * g.dtheta(), B = 0.5 * g.dphi();
  const double th0 = g.theta[it], ph0 = g.phi[ip];
  const Vec3 xi = sphere_point(a, th0, ph0);
  M0.setZero();
  Mt.setZero();
  Mp.setZero();
  for (int pairdir = 0; pairdir < 2; ++pairdir) {       // quadrant pair (+,+)/(-,-) and (+,-)/(-,+)
    const double sb = (pairdir == 0) ? 1.0 : -1.0;
    for (int duf = 0; duf < 2; ++duf) {                 // two Duffy triangles per quadrant
      for (int u = 0; u < gauss; ++u) {
        for (int v = 0; v < gauss; ++v) {
          const double xi1 = gx01[u], eta1 = gx01[v];
          double s1, s2, jac;
          if (duf == 0) {
            s1 = A * xi1;
            s2 = B * xi1 * eta1;
          } else {
            s1 = A * xi1 * eta1;
            s2 = B * xi1;
          }
          jac = A * B * xi1 * gw01[u] * gw01[v];
          for (int sgn = -1; sgn <= 1; sgn += 2) {      // point and its mirror
            const double th = th0 + sgn * s1;
            const double ph = ph0 + sgn * sb * s2;
            const Vec3 y = sphere_point(a, th, ph);
            const Vec3 d = xi - y;
            const double r = d.norm();
            if (!(r > 0.0)) continue;
            const double dsig = jac * a * a * std::sin(th);
            const Mat4 K = coeffs_to_matrix(kernel_coeffs(kind, p, lam, r), d);
            M0 += dsig * K;
            Mt += (dsig * (th - th0)) * K;
            Mp += (dsig * (ph - ph0)) * K;
          }
        }
      }
    }
  }
}

}  // namespace

int default_window(int n_theta) { return std::min(8, std::max(3, n_theta / 4)); }

namespace detail {

NearField near_field(KernelKind kind, const PhysParams& p, Complex lam, const Surface& s,
                     const AssembleOptions& opt) {
  if (!s.grid.has_value())
    throw std::invalid_argument("near_field: requires a structured sphere grid");
  const SphereGrid& g = *s.grid;
  const int n = g.n_theta, nphi = g.n_phi;
  const int R = (opt.window > 0) ? opt.window : default_window(n);
  const double dth = g.dtheta(), dph = g.dphi();
  Eigen::VectorXd sw = s.weights.array().sqrt();

  std::vector<double> gx, gw;
  gauss_legendre(opt.gauss_near, gx, gw);
  std::vector<double> gx01(opt.gauss_self), gw01(opt.gauss_self);
  {
    std::vector<double> x0, w0;
    gauss_legendre(opt.gauss_self, x0, w0);
    for (int i = 0; i < opt.gauss_self; ++i) {
      gx01[i] = 0.5 * (x0[i] + 1.0);
      gw01[i] = 0.5 * w0[i];
    }
  }
  auto node_index = [&](int it, int ip) -> Eigen::Index {
    return Eigen::Index(it) * nphi + ((ip % nphi) + nphi) % nphi;
  };

  NearField nf;
  nf.rows.resize(Eigen::Index(n) * nphi);
  nf.window_cols.resize(Eigen::Index(n) * nphi);

  Mat4 M0, Mt, Mp;
  for (int it = 0; it < n; ++it) {
    for (int ip = 0; ip < nphi; ++ip) {
      const Eigen::Index i = node_index(it, ip);
      const Vec3 xi = s.nodes.row(i);
      NearAccumulator na;
      auto& wcols = nf.window_cols[i];
      for (int jt = std::max(0, it - R); jt <= std::min(n - 1, it + R); ++jt) {
        for (int off = -R; off <= R; ++off) {
          const int jp = ip + off;
          const Eigen::Index j = node_index(jt, jp);
          wcols.push_back(j);
          if (j == i)
            self_cell_moments(kind, p, lam, g, it, ip, opt.gauss_self, gx01, gw01, M0, Mt, Mp);
          else
            cell_moments(kind, p, lam, g, xi, jt, ((jp % nphi) + nphi) % nphi, opt.gauss_near, gx,
                         gw, M0, Mt, Mp);
          na.add(j, M0);
          // P1 via central differences (one-sided at the polar rings)
          if (jt > 0 && jt < n - 1) {
            na.add(node_index(jt + 1, jp), Mt / (2.0 * dth));
            na.add(node_index(jt - 1, jp), -Mt / (2.0 * dth));
          } else if (jt == 0) {
            na.add(node_index(jt + 1, jp), Mt / dth);
            na.add(j, -Mt / dth);
          } else {
            na.add(j, Mt / dth);
            na.add(node_index(jt - 1, jp), -Mt / dth);
          }
          na.add(node_index(jt, jp + 1), Mp / (2.0 * dph));
          na.add(node_index(jt, jp - 1), -Mp / (2.0 * dph));
        }
      }
      auto& row = nf.rows[i];
      row.reserve(na.acc.size());
      for (const auto& [j, blk] : na.acc) row.emplace_back(j, (sw(i) / sw(j)) * blk);
    }
  }
  return nf;
}

Eigen::MatrixXcd assemble_matrix(KernelKind kind, const PhysParams& p, Complex lam,
                                 const Surface& s, const AssembleOptions& opt) {
  const Eigen::Index N = s.size();
  const Eigen::Index dim = 4 * N;
  if (dim > 12000)
    throw std::runtime_error("assemble: dense matrix too large; use the windowed operator path");
  Eigen::MatrixXcd B(dim, dim);
  B.setZero();

  Eigen::VectorXd sw = s.weights.array().sqrt();

  // far field: point-sampled kernel, zero diagonal
  for (Eigen::Index i = 0; i < N; ++i) {
    const Vec3 xi = s.nodes.row(i);
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j == i) continue;
      const Vec3 d = xi - Vec3(s.nodes.row(j));
      const auto kc = kernel_coeffs(kind, p, lam, d.norm());
      B.block<4, 4>(4 * i, 4 * j) = (sw(i) * sw(j)) * coeffs_to_matrix(kc, d);
    }
  }

  if (opt.policy == PvPolicy::ProductIntegration && s.grid.has_value()) {
    NearField nf = near_field(kind, p, lam, s, opt);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j : nf.window_cols[i]) B.block<4, 4>(4 * i, 4 * j).setZero();
      for (const auto& [j, blk] : nf.rows[i]) B.block<4, 4>(4 * i, 4 * j) += blk;
    }
  }

  if (hermitian_case(kind, lam)) B = 0.5 * (B + B.adjoint()).eval();
  return B;
}

}  // namespace detail

double AssembledOperator::hermiticity_residual() const {
  const double nrm = matrix.norm();
  if (nrm == 0.0) return 0.0;
  return (matrix - matrix.adjoint()).norm() / nrm;
}

namespace {
AssembledOperator finish(OperatorKind okind, const PhysParams& p, Complex lam,
                         std::shared_ptr<const Surface> s, Eigen::MatrixXcd&& B,
                         const AssembleOptions& opt) {
  AssembledOperator op;
  op.lambda = lam;
  op.kind = okind;
  op.pv_policy = (opt.policy == PvPolicy::ProductIntegration && s->grid.has_value())
                     ? PvPolicy::ProductIntegration
                     : PvPolicy::DiagonalExclusion;
  op.matrix = std::move(B);
  op.surface = std::move(s);
  op.params = p;
  return op;
}
}  // namespace

AssembledOperator assemble_M(const PhysParams& p, Complex lam, std::shared_ptr<const Surface> s,
                             const AssembleOptions& opt) {
  p.validate();
  const double edge = p.gap_edge();
  KernelKind kind = KernelKind::Weyl;
  if (is_real(lam)) {
    const double lr = lam.real();
    if (std::abs(std::abs(lr) - edge) < 1e-14 * std::max(1.0, edge))
      kind = lr > 0 ? KernelKind::EndpointPlus : KernelKind::EndpointMinus;
    else if (std::abs(lr) > edge)
      throw std::domain_error("assemble_M: real lambda outside [-mc^2, mc^2]");
  }
  return finish(OperatorKind::WeylM, p, lam, s,
                detail::assemble_matrix(kind, p, lam, *s, opt), opt);
}

AssembledOperator assemble_dM(const PhysParams& p, Complex lam, std::shared_ptr<const Surface> s,
                              const AssembleOptions& opt) {
  p.validate();
  const double edge = p.gap_edge();
  if (is_real(lam) && std::abs(std::abs(lam.real()) - edge) < 1e-14 * std::max(1.0, edge))
    throw std::domain_error("assemble_dM: branch point at lambda = +-mc^2");
  if (is_real(lam) && std::abs(lam.real()) > edge)
    throw std::domain_error("assemble_dM: real lambda outside the gap");
  return finish(OperatorKind::WeylMDerivative, p, lam, s,
                detail::assemble_matrix(KernelKind::WeylDerivative, p, lam, *s, opt), opt);
}

AssembledOperator assemble_M_schrodinger(double m, Complex lam, std::shared_ptr<const Surface> s,
                                         const AssembleOptions& opt) {
  if (is_real(lam) && lam.real() >= 0.0)
    throw std::domain_error("assemble_M_schrodinger: lambda on [0, inf)");
  PhysParams p{m, 1.0, 0.0};
  return finish(OperatorKind::SchrodingerM, p, lam, s,
                detail::assemble_matrix(KernelKind::Schrodinger, p, lam, *s, opt), opt);
}

AssembledOperator assemble_M_shifted(const PhysParams& p, Complex lam_nr,
                                     std::shared_ptr<const Surface> s,
                                     const AssembleOptions& opt) {
  p.validate();
  return finish(OperatorKind::ShiftedM, p, lam_nr, s,
                detail::assemble_matrix(KernelKind::Shifted, p, lam_nr, *s, opt), opt);
}

double operator_norm(const Eigen::MatrixXcd& B, int iters) {
  if (B.size() == 0) return 0.0;
  Eigen::VectorXcd v(B.cols());
  // deterministic pseudo-random start
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::sin(0.7 * double(i + 1)), b = std::cos(1.3 * double(i + 1));
    v(i) = Complex(a, b);
  }
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXcd u = B * v;
    Eigen::VectorXcd w = B.adjoint() * u;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double snew = std::sqrt(nw);
    v = w / nw;
    if (it > 8 && std::abs(snew - sigma) < 1e-12 * std::max(1.0, snew)) {
      sigma = snew;
      break;
    }
    sigma = snew;
  }
  return (B * v).norm();
}

}  // namespace dsh
