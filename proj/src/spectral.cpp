#include "deltashell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deltashell/big_operator.hpp"

namespace dsh {

EigResult eig_M(const AssembledOperator& op, bool with_vectors, double herm_tol) {
  const double hres = op.hermiticity_residual();
  if (hres > herm_tol)
    throw std::runtime_error("eig_M: assembly-integrity error, Hermiticity residual " +
                             std::to_string(hres));
  EigResult out;
  if (op.dim() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      op.matrix, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_M: eigensolver failed");
  out.values = es.eigenvalues();
  if (with_vectors) out.vectors = es.eigenvectors();
  return out;
}

double condition_estimate(const Eigen::MatrixXcd& A, int iters) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::PartialPivLU<Eigen::MatrixXcd> luH(A.adjoint().eval());
  // power iteration on A^H A for sigma_max
  Eigen::VectorXcd v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = Complex(std::sin(0.37 * double(i + 1)), std::cos(0.91 * double(i + 1)));
  v.normalize();
  double smax = 0.0;
  for (int it = 0; it < iters; ++it) {
    v = A.adjoint() * (A * v);
    smax = std::sqrt(v.norm());
    v.normalize();
  }
  // power iteration on (A^H A)^{-1} for 1/sigma_min
  Eigen::VectorXcd u(A.cols());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u(i) = Complex(std::cos(0.53 * double(i + 2)), std::sin(0.29 * double(i + 2)));
  u.normalize();
  double inv_norm = 1.0;
  for (int it = 0; it < iters; ++it) {
    u = luH.solve(u);
    u = lu.solve(u);
    inv_norm = std::sqrt(u.norm());
    u.normalize();
  }
  return smax * inv_norm;
}

LanczosResult lanczos_extreme(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& matvec,
    Eigen::Index dim, int howmany, bool largest, int max_iter, double tol,
    const Eigen::VectorXcd* warm_start) {
  LanczosResult out;
  max_iter = int(std::min<Eigen::Index>(max_iter, dim));
  Eigen::MatrixXcd V(dim, max_iter + 1);
  Eigen::VectorXd alpha(max_iter), betav(max_iter);
  Eigen::VectorXcd v(dim), w(dim);
  if (warm_start && warm_start->size() == dim) {
    v = *warm_start;
  } else {
    for (Eigen::Index i = 0; i < dim; ++i)
      v(i) = Complex(std::sin(0.61 * double(i + 1)), std::cos(1.17 * double(i + 1)));
  }
  v.normalize();
  V.col(0) = v;
  double beta_prev = 0.0;
  int k = 0;
  for (; k < max_iter; ++k) {
    matvec(V.col(k), w);
    if (k > 0) w -= beta_prev * V.col(k - 1);
    alpha(k) = std::real(V.col(k).dot(w));
    w -= alpha(k) * V.col(k);
    // full reorthogonalization (twice for safety)
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(k + 1) * (V.leftCols(k + 1).adjoint() * w).eval();
    beta_prev = w.norm();
    betav(k) = beta_prev;
    if (beta_prev < 1e-14) {
      ++k;
      break;
    }
    V.col(k + 1) = w / beta_prev;
    // convergence: residual bound beta_k |last component| for the tracked end
    if (k >= std::max(2 * howmany, 10) && (k % 5 == 0)) {
      const int kk = k + 1;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(kk, kk);
      for (int i = 0; i < kk; ++i) {
        T(i, i) = alpha(i);
        if (i + 1 < kk) T(i, i + 1) = T(i + 1, i) = betav(i);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
      const Eigen::VectorXd& ev = tes.eigenvalues();
      const double scale = std::max(std::abs(ev(0)), std::abs(ev(kk - 1)));
      bool done = true;
      for (int i = 0; i < std::min(howmany, kk); ++i) {
        const int src = largest ? kk - 1 - i : i;
        const double resid = beta_prev * std::abs(tes.eigenvectors()(kk - 1, src));
        if (resid > tol * std::max(1.0, scale)) {
          done = false;
          break;
        }
      }
      if (done) {
        ++k;
        break;
      }
    }
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha(i);
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = betav(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
  const Eigen::VectorXd& ev = tes.eigenvalues();
  const int m = std::min(howmany, k);
  out.values.resize(m);
  out.vectors.resize(dim, m);
  for (int i = 0; i < m; ++i) {
    const int src = largest ? k - 1 - i : i;
    out.values(i) = ev(src);
    out.vectors.col(i) = V.leftCols(k) * tes.eigenvectors().col(src);
  }
  out.iterations = k;
  return out;
}

namespace {

Eigen::VectorXd window_values(const PhysParams& p, Complex lam, std::shared_ptr<const Surface> s,
                              const WindowSpec& win, const AssembleOptions& aopt,
                              Eigen::VectorXcd* warm, Eigen::MatrixXcd* vectors_out = nullptr) {
  // the window sits above the +1/(2c) cluster or below the -1/(2c) cluster
  const bool largest = win.center >= 0.0;
  const Eigen::Index dim = 4 * s->size();
  LanczosResult lr;
  if (dim <= 12000) {
    AssembledOperator op = assemble_M(p, lam, s, aopt);
    const Eigen::MatrixXcd& B = op.matrix;
    auto mv = [&B](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = B * x; };
    lr = lanczos_extreme(mv, dim, win.count, largest, 200, 1e-11, warm);
  } else {
    BigWeylOperator big(p, lam.real(), s, aopt);
    auto mv = [&big](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { big.apply(x, y); };
    lr = lanczos_extreme(mv, dim, win.count, largest, 200, 1e-11, warm);
  }
  if (warm && lr.vectors.cols() > 0) *warm = lr.vectors.col(0);
  if (vectors_out) *vectors_out = lr.vectors;
  std::sort(lr.values.data(), lr.values.data() + lr.values.size());
  return lr.values;
}

}  // namespace

SpectralCurve scan_curves(const PhysParams& p, std::shared_ptr<const Surface> s,
                          const Eigen::VectorXd& lambda_grid, const ScanOptions& opt) {
  if (lambda_grid.size() < 1) throw std::invalid_argument("scan_curves: empty grid");
  const double edge = p.gap_edge();
  for (Eigen::Index i = 0; i < lambda_grid.size(); ++i)
    if (std::abs(lambda_grid(i)) > edge * (1 + 1e-14))
      throw std::domain_error("scan_curves: grid point outside [-mc^2, mc^2]");

  SpectralCurve out;
  out.lambda_grid = lambda_grid;
  const Eigen::Index dim = 4 * s->size();
  const bool windowed = dim > opt.dense_limit;
  if (windowed && !opt.window)
    throw std::runtime_error("scan_curves: matrix too large for full scan; provide a window");
  out.windowed = windowed;

  Eigen::VectorXcd warm;
  for (Eigen::Index k = 0; k < lambda_grid.size(); ++k) {
    const Complex lam(lambda_grid(k), 0.0);
    if (windowed) {
      out.branches.push_back(window_values(p, lam, s, *opt.window, opt.assemble, &warm));
    } else {
      EigResult er = eig_M(assemble_M(p, lam, s, opt.assemble));
      out.branches.push_back(er.values);
    }
    out.norm_scale = std::max(out.norm_scale, out.branches.back().cwiseAbs().maxCoeff());
  }
  // linked-branch monotonicity (sorted-index linking)
  const double slack = opt.slack_factor * out.norm_scale;
  for (size_t k = 0; k + 1 < out.branches.size(); ++k) {
    const Eigen::VectorXd& a = out.branches[k];
    const Eigen::VectorXd& b = out.branches[k + 1];
    const Eigen::Index nb = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < nb; ++i) {
      const double step = b(i) - a(i);
      if (step < -slack) {
        ++out.monotonicity_violations;
        out.worst_decrease = std::min(out.worst_decrease, step);
      }
    }
  }
  return out;
}

namespace {

// eigenvalue of M_N(lambda) nearest to `target`, with optional eigenvector
double branch_value(const PhysParams& p, double lam, std::shared_ptr<const Surface> s,
                    double target, const FindOptions& opt, Eigen::VectorXcd* warm,
                    Eigen::VectorXcd* vec_out = nullptr) {
  const Eigen::Index dim = 4 * s->size();
  if (dim <= opt.dense_limit) {
    AssembledOperator op = assemble_M(p, Complex(lam, 0.0), s, opt.assemble);
    EigResult er = eig_M(op, vec_out != nullptr);
    Eigen::Index best = 0;
    (er.values.array() - target).abs().minCoeff(&best);
    if (vec_out) *vec_out = er.vectors.col(best);
    return er.values(best);
  }
  const int howmany = 8;
  LanczosResult lr;
  if (dim <= 12000) {
    AssembledOperator op = assemble_M(p, Complex(lam, 0.0), s, opt.assemble);
    const Eigen::MatrixXcd& B = op.matrix;
    auto mv = [&B](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = B * x; };
    lr = lanczos_extreme(mv, dim, howmany, target >= 0.0, 200, 1e-11, warm);
  } else {
    BigWeylOperator big(p, lam, s, opt.assemble);
    auto mv = [&big](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { big.apply(x, y); };
    lr = lanczos_extreme(mv, dim, howmany, target >= 0.0, 200, 1e-11, warm);
  }
  if (warm && lr.vectors.cols() > 0) *warm = lr.vectors.col(0);
  Eigen::Index best = 0;
  (lr.values.array() - target).abs().minCoeff(&best);
  if (vec_out) *vec_out = lr.vectors.col(best);
  return lr.values(best);
}

}  // namespace

namespace {

// Refine a crossing with known branch values at the bracket endpoints. The
// branch is followed by selecting, at each query point, the eigenvalue
// nearest to the linear prediction between the current bracket values.
BoundState refine_with_values(const PhysParams& p, std::shared_ptr<const Surface> s, double lo,
                              double hi, double mu_lo, double mu_hi, const FindOptions& opt) {
  const double target = -1.0 / p.eta;
  Eigen::VectorXcd warm;
  double glo = mu_lo - target, ghi = mu_hi - target;
  if (glo * ghi > 0.0)
    throw std::runtime_error("refine_bound_state: bracket does not straddle the crossing");
  const double res_tol = opt.residual_tol_scale * std::max(1.0, 1.0 / std::abs(p.eta));
  double mid = 0.5 * (lo + hi), gm = 0.5 * (glo + ghi);
  for (int it = 0; it < opt.max_refine; ++it) {
    // safeguarded false position: secant point clipped to the middle 90%
    double cand = hi - ghi * (hi - lo) / (ghi - glo);
    const double lo_cl = lo + 0.05 * (hi - lo), hi_cl = hi - 0.05 * (hi - lo);
    if (!(cand > lo_cl && cand < hi_cl) || (it % 3 == 2)) cand = 0.5 * (lo + hi);
    mid = cand;
    const double frac = (mid - lo) / (hi - lo);
    const double pred = (1.0 - frac) * (glo + target) + frac * (ghi + target);
    const double mu_mid = branch_value(p, mid, s, pred, opt, &warm);
    gm = mu_mid - target;
    if (glo * gm <= 0.0) {
      hi = mid;
      ghi = gm;
    } else {
      lo = mid;
      glo = gm;
    }
    if (std::abs(gm) <= res_tol || (hi - lo) <= opt.lambda_tol) break;
  }
  BoundState bs;
  bs.lambda_star = mid;
  bs.residual = std::abs(gm);
  if (opt.compute_slopes && 4 * s->size() <= 12000) {
    Eigen::VectorXcd warm2, v;
    branch_value(p, mid, s, gm + target, opt, &warm2, &v);
    AssembledOperator dop = assemble_dM(p, Complex(mid, 0.0), s, opt.assemble);
    bs.branch_slope = std::real(v.dot(dop.matrix * v));
  }
  return bs;
}

}  // namespace

BoundState refine_bound_state(const PhysParams& p, std::shared_ptr<const Surface> s, double lo,
                              double hi, const FindOptions& opt) {
  if (p.eta == 0.0) throw std::invalid_argument("refine_bound_state: eta = 0");
  if (p.eta_excluded()) throw std::invalid_argument("refine_bound_state: eta = +-2c excluded");
  const double target = -1.0 / p.eta;
  Eigen::VectorXcd warm;
  const double mu_lo = branch_value(p, lo, s, target, opt, &warm);
  const double mu_hi = branch_value(p, hi, s, target, opt, &warm);
  return refine_with_values(p, s, lo, hi, mu_lo, mu_hi, opt);
}

std::vector<BoundState> find_bound_states(const PhysParams& p, std::shared_ptr<const Surface> s,
                                          const SpectralCurve& curve, const FindOptions& opt) {
  std::vector<BoundState> out;
  if (p.eta == 0.0) return out;
  if (p.eta_excluded()) throw std::invalid_argument("find_bound_states: eta = +-2c excluded");
  const double target = -1.0 / p.eta;

  for (size_t k = 0; k + 1 < curve.branches.size(); ++k) {
    const Eigen::VectorXd& a = curve.branches[k];
    const Eigen::VectorXd& b = curve.branches[k + 1];
    const Eigen::Index nb = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < nb; ++i) {
      const double ga = a(i) - target, gb = b(i) - target;
      if (ga == 0.0 && k > 0) continue;  // counted at the previous interval
      if (ga * gb > 0.0) continue;
      BoundState bs = refine_with_values(p, s, curve.lambda_grid(k), curve.lambda_grid(k + 1),
                                         a(i), b(i), opt);
      bs.branch_index = int(i);
      out.push_back(bs);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BoundState& x, const BoundState& y) { return x.lambda_star < y.lambda_star; });
  // multiplicity: crossings clustering within 10x the refinement tolerance
  const double cluster_tol = 10.0 * std::max(opt.lambda_tol, 1e-12);
  for (size_t i = 0; i < out.size();) {
    size_t j = i + 1;
    while (j < out.size() && std::abs(out[j].lambda_star - out[j - 1].lambda_star) <= cluster_tol)
      ++j;
    for (size_t q = i; q < j; ++q) out[q].multiplicity_estimate = int(j - i);
    i = j;
  }
  return out;
}

M0Estimate estimate_M0(const PhysParams& p, std::shared_ptr<const Surface> s,
                       const Eigen::VectorXd& grid, const ScanOptions& opt) {
  const double edge = p.gap_edge();
  if (grid.size() < 2 || std::abs(grid.minCoeff() + edge) > 1e-12 * std::max(1.0, edge) ||
      std::abs(grid.maxCoeff() - edge) > 1e-12 * std::max(1.0, edge))
    throw std::invalid_argument("estimate_M0: grid must cover [-mc^2, mc^2] incl. endpoints");
  M0Estimate est;
  est.grid = grid;
  est.surface = s->descriptor;
  const Eigen::Index dim = 4 * s->size();
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    AssembledOperator op = assemble_M(p, Complex(grid(k), 0.0), s, opt.assemble);
    double nrm;
    if (dim <= opt.dense_limit) {
      EigResult er = eig_M(op);
      nrm = er.values.cwiseAbs().maxCoeff();
    } else {
      nrm = operator_norm(op.matrix);
    }
    est.value = std::max(est.value, nrm);
  }
  return est;
}

PairingReport pairing_check(const AssembledOperator& op) {
  if (op.kind != OperatorKind::WeylM || !is_real(op.lambda))
    throw std::invalid_argument("pairing_check: requires M(lambda) at real lambda");
  PairingReport rep;
  EigResult er = eig_M(op);
  const Eigen::VectorXd& ev = er.values;
  const double c = op.params.c;
  const double half = 1.0 / (2.0 * c);

  rep.cluster_fraction_005 =
      double(((ev.array() - half).abs() < 0.05).count() + ((ev.array() + half).abs() < 0.05).count()) /
      double(ev.size());

  std::vector<Eigen::Index> idx(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev(a)) > std::abs(ev(b)); });
  for (int t = 0; t < std::min<Eigen::Index>(10, ev.size()); ++t) {
    const double mu = ev(idx[t]);
    const double partner = -1.0 / (4.0 * c * c * mu);
    const double defect = (ev.array() - partner).abs().minCoeff() / std::abs(partner);
    rep.worst_defect_top10 = std::max(rep.worst_defect_top10, defect);
  }

  // singular values of M^2 - I/(4c^2) from the same spectrum
  Eigen::VectorXd sv = (ev.array().square() - 1.0 / (4.0 * c * c)).abs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
  rep.singular_values = sv;
  const Eigen::Index tail_idx = std::min<Eigen::Index>(sv.size() - 1, op.dim() / 4);
  rep.tail_decay = sv(0) / std::max(sv(tail_idx), 1e-300);
  rep.full_decay = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
  return rep;
}

TraceCheckReport trace_formula_check(const PhysParams& p, std::shared_ptr<const Surface> s,
                                     Complex lam, const AssembleOptions& opt) {
  if (is_real(lam)) throw std::invalid_argument("trace_formula_check: lambda must be non-real");
  if (p.eta_excluded()) throw std::invalid_argument("trace_formula_check: eta = +-2c excluded");
  TraceCheckReport rep;
  if (p.eta == 0.0) return rep;

  const double h = 1e-3 * std::abs(lam.imag());
  const Eigen::Index dim = 4 * s->size();
  auto X = [&](Complex mu, bool fd_inner) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd M = assemble_M(p, mu, s, opt).matrix;
    Eigen::MatrixXcd dM;
    if (fd_inner) {
      const Eigen::MatrixXcd Mp = assemble_M(p, mu + h, s, opt).matrix;
      const Eigen::MatrixXcd Mm = assemble_M(p, mu - h, s, opt).matrix;
      dM = (Mp - Mm) / (2.0 * h);
    } else {
      dM = assemble_dM(p, mu, s, opt).matrix;
    }
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(dim, dim) + p.eta * M;
    if (rep.condition_estimate == 0.0) {
      rep.condition_estimate = condition_estimate(A);
      if (rep.condition_estimate > 1e12)
        throw std::runtime_error("trace_formula_check: I + eta M ill-conditioned");
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    return lu.solve(p.eta * dM);
  };

  for (int mode = 0; mode < 2; ++mode) {
    const bool fd_inner = (mode == 1);
    const Eigen::MatrixXcd Xp = X(lam + h, fd_inner);
    const Eigen::MatrixXcd X0 = X(lam, fd_inner);
    const Eigen::MatrixXcd Xm = X(lam - h, fd_inner);
    const Complex val = -0.5 * ((Xp - 2.0 * X0 + Xm) / (h * h)).trace();
    if (fd_inner)
      rep.lhs_proxy = val;
    else
      rep.rhs = val;
  }
  rep.relative_gap = std::abs(rep.rhs - rep.lhs_proxy) / std::max(std::abs(rep.rhs), 1e-300);
  return rep;
}

std::vector<CountRow> eigenvalue_count_experiment(const PhysParams& base,
                                                  std::shared_ptr<const Surface> s,
                                                  const std::vector<double>& eta_list,
                                                  const std::vector<double>& c_list,
                                                  const Eigen::VectorXd& lambda_grid,
                                                  const FindOptions& opt) {
  std::vector<CountRow> rows;
  for (double c : c_list) {
    PhysParams p = base;
    p.c = c;
    // the grid is specified in units of the gap edge
    Eigen::VectorXd grid = lambda_grid * (p.gap_edge() / base.gap_edge());
    ScanOptions sopt;
    sopt.assemble = opt.assemble;
    SpectralCurve curve = scan_curves(p, s, grid, sopt);
    for (double eta : eta_list) {
      p.eta = eta;
      if (p.eta_excluded()) continue;
      rows.push_back({eta, c, int(find_bound_states(p, s, curve, opt).size())});
    }
  }
  return rows;
}

}  // namespace dsh
