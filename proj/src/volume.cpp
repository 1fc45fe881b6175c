#include "deltashell/volume.hpp"

#include <cmath>
#include <stdexcept>

namespace dsh {

VolumeGrid make_volume_grid(double box, int n) {
  if (!(box > 0.0) || n < 2) throw std::invalid_argument("make_volume_grid: bad parameters");
  VolumeGrid g;
  g.box = box;
  g.n = n;
  g.h = 2.0 * box / n;
  g.cell_weight = g.h * g.h * g.h;
  g.points.resize(Eigen::Index(n) * n * n, 3);
  Eigen::Index idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++idx) {
        g.points(idx, 0) = -box + g.h * (i + 0.5);
        g.points(idx, 1) = -box + g.h * (j + 0.5);
        g.points(idx, 2) = -box + g.h * (k + 0.5);
      }
  return g;
}

Eigen::MatrixX4cd sample_field(const VolumeField& f, const VolumeGrid& g) {
  Eigen::MatrixX4cd out(g.size(), 4);
  for (Eigen::Index k = 0; k < g.size(); ++k) out.row(k) = f(g.points.row(k)).transpose();
  return out;
}

namespace {

void gauss_legendre01(int g, std::vector<double>& x, std::vector<double>& w) {
  // nodes/weights on (-1/2, 1/2)
  x.assign(g, 0.0);
  w.assign(g, 0.0);
  for (int i = 0; i < (g + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (g + 0.5));
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
    x[i] = -0.5 * z;
    x[g - 1 - i] = 0.5 * z;
    w[i] = w[g - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace

Eigen::MatrixX4cd volume_convolve(KernelKind kind, const PhysParams& p, Complex lam,
                                  const Eigen::MatrixX4cd& f_vals, const VolumeGrid& g,
                                  const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                  int rings, int gauss) {
  if (f_vals.rows() != g.size()) throw std::invalid_argument("volume_convolve: field size mismatch");
  const Eigen::Index M = g.size();
  const double h = g.h;

  std::vector<double> qx, qw;
  gauss_legendre01(gauss, qx, qw);
  // tensor offsets within one cell
  std::vector<Vec3> cell_off;
  std::vector<double> cell_w;
  for (int a = 0; a < gauss; ++a)
    for (int b = 0; b < gauss; ++b)
      for (int c = 0; c < gauss; ++c) {
        cell_off.emplace_back(h * qx[a], h * qx[b], h * qx[c]);
        cell_w.push_back(qw[a] * qw[b] * qw[c] * g.cell_weight);
      }

  Eigen::MatrixX4cd out(targets.rows(), 4);
  out.setZero();
  const int n = g.n;
  auto cell_of = [&](double x) { return int(std::floor((x + g.box) / h)); };

  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    const Vec3 xt = targets.row(t);
    // near set: cells within `rings` (Chebyshev) of the target's cell
    const int ci = cell_of(xt[0]), cj = cell_of(xt[1]), ck = cell_of(xt[2]);
    const int ilo = std::max(0, ci - rings), ihi = std::min(n - 1, ci + rings);
    const int jlo = std::max(0, cj - rings), jhi = std::min(n - 1, cj + rings);
    const int klo = std::max(0, ck - rings), khi = std::min(n - 1, ck + rings);

    Vec4 acc = Vec4::Zero();
    for (Eigen::Index k = 0; k < M; ++k) {
      const int ki = int(k / (Eigen::Index(n) * n));
      const int kj = int((k / n) % n);
      const int kk = int(k % n);
      if (ki >= ilo && ki <= ihi && kj >= jlo && kj <= jhi && kk >= klo && kk <= khi)
        continue;  // near cell, handled below
      const Vec3 d = xt - Vec3(g.points.row(k));
      const Vec4 fk = f_vals.row(k).transpose();
      apply_coeffs(kernel_coeffs(kind, p, lam, d.norm()), d, fk, acc);
    }
    acc *= g.cell_weight;
    // near cells: product integration against the nodal value
    for (int ki = ilo; ki <= ihi; ++ki)
      for (int kj = jlo; kj <= jhi; ++kj)
        for (int kk = klo; kk <= khi; ++kk) {
          const Eigen::Index k = (Eigen::Index(ki) * n + kj) * n + kk;
          const Vec3 yk = g.points.row(k);
          const Vec4 fk = f_vals.row(k).transpose();
          Vec4 cell_acc = Vec4::Zero();
          for (size_t q = 0; q < cell_off.size(); ++q) {
            const Vec3 d = xt - (yk + cell_off[q]);
            const double r = d.norm();
            if (!(r > 1e-12)) continue;
            Vec4 tmp = Vec4::Zero();
            apply_coeffs(kernel_coeffs(kind, p, lam, r), d, fk, tmp);
            cell_acc += cell_w[q] * tmp;
          }
          acc += cell_acc;
        }
    out.row(t) = acc.transpose();
  }
  return out;
}

}  // namespace dsh
