#include "deltashell/big_operator.hpp"

#include <map>
#include <stdexcept>

namespace dsh {

BigWeylOperator::BigWeylOperator(const PhysParams& p, double lam,
                                 std::shared_ptr<const Surface> s, const AssembleOptions& opt) {
  if (!s->grid.has_value())
    throw std::invalid_argument("BigWeylOperator: requires a structured sphere grid");
  if (std::abs(lam) >= p.gap_edge())
    throw std::domain_error("BigWeylOperator: lambda must lie strictly inside the gap");
  N_ = int(s->size());
  const size_t NN = size_t(N_) * size_t(N_);
  s1_.assign(NN, 0.0);
  s2_.assign(NN, 0.0);
  va0_.assign(NN, 0.0);
  va1_.assign(NN, 0.0);
  va2_.assign(NN, 0.0);

  Eigen::VectorXd sw = s->weights.array().sqrt();
  const PhysParams pp = p;
  const Complex lamc(lam, 0.0);

  for (int i = 0; i < N_; ++i) {
    const Vec3 xi = s->nodes.row(i);
    const size_t base = size_t(i) * N_;
    for (int j = 0; j < N_; ++j) {
      if (j == i) continue;
      const Vec3 d = xi - Vec3(s->nodes.row(j));
      const auto kc = kernel_coeffs(KernelKind::Weyl, pp, lamc, d.norm());
      const double wf = sw(i) * sw(j);
      // real lambda in the gap: sI, sB real; sA purely imaginary
      s1_[base + j] = wf * std::real(kc.sI + kc.sB);
      s2_[base + j] = wf * std::real(kc.sI - kc.sB);
      const double sa = wf * std::imag(kc.sA);
      va0_[base + j] = sa * d[0];
      va1_[base + j] = sa * d[1];
      va2_[base + j] = sa * d[2];
    }
  }

  // product-integrated near field replaces the window entries
  detail::NearField nf = detail::near_field(KernelKind::Weyl, pp, lamc, *s, opt);
  for (int i = 0; i < N_; ++i) {
    const size_t base = size_t(i) * N_;
    for (Eigen::Index j : nf.window_cols[i]) {
      s1_[base + j] = s2_[base + j] = 0.0;
      va0_[base + j] = va1_[base + j] = va2_[base + j] = 0.0;
    }
  }
  // Hermitian symmetrization of the near blocks: (i,j,blk) contributes
  // blk/2 to row i and blk^H/2 to row j.
  std::vector<std::map<int, Mat4>> sym(N_);
  for (int i = 0; i < N_; ++i) {
    for (const auto& [j, blk] : nf.rows[i]) {
      auto add = [&](int r, int cidx, const Mat4& b) {
        auto it = sym[r].find(cidx);
        if (it == sym[r].end())
          sym[r].emplace(cidx, b);
        else
          it->second += b;
      };
      add(i, int(j), 0.5 * blk);
      add(int(j), i, 0.5 * blk.adjoint());
    }
  }
  near_.resize(N_);
  for (int i = 0; i < N_; ++i) {
    near_[i].reserve(sym[i].size());
    for (const auto& [j, blk] : sym[i]) near_[i].emplace_back(j, blk);
  }
}

void BigWeylOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  y.setZero(dim());
  const Complex* xv = x.data();
  Complex* yv = y.data();
  const Complex kI(0.0, 1.0);
  for (int i = 0; i < N_; ++i) {
    const size_t base = size_t(i) * N_;
    Complex y0 = 0, y1 = 0, y2 = 0, y3 = 0;
    for (int j = 0; j < N_; ++j) {
      const double a1 = s1_[base + j];
      const double a2 = s2_[base + j];
      const double v0 = va0_[base + j], v1 = va1_[base + j], v2 = va2_[base + j];
      if (a1 == 0.0 && a2 == 0.0 && v0 == 0.0 && v1 == 0.0 && v2 == 0.0) continue;
      const Complex* u = xv + 4 * j;
      y0 += a1 * u[0] + kI * (v2 * u[2] + Complex(v0, -v1) * u[3]);
      y1 += a1 * u[1] + kI * (Complex(v0, v1) * u[2] - v2 * u[3]);
      y2 += a2 * u[2] + kI * (v2 * u[0] + Complex(v0, -v1) * u[1]);
      y3 += a2 * u[3] + kI * (Complex(v0, v1) * u[0] - v2 * u[1]);
    }
    yv[4 * i] += y0;
    yv[4 * i + 1] += y1;
    yv[4 * i + 2] += y2;
    yv[4 * i + 3] += y3;
  }
  for (int i = 0; i < N_; ++i) {
    for (const auto& [j, blk] : near_[i]) {
      Eigen::Map<const Vec4> u(xv + 4 * j);
      Eigen::Map<Vec4> w(yv + 4 * i);
      w += blk * u;
    }
  }
}

}  // namespace dsh
