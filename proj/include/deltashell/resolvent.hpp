#pragma once

#include "deltashell/assemble.hpp"
#include "deltashell/volume.hpp"

namespace dsh {

/// Surface density: one complex 4-vector per node.
using SurfaceDensity = Eigen::MatrixX4cd;

/// gamma(lambda) phi at off-surface targets:
///   (gamma phi)(t) = sum_j w_j G_lambda(t - x_j) phi_j.
/// Targets closer to Sigma than h_min raise a near-singular error unless
/// `allow_near` is set, in which case the surface cells are product-
/// integrated for such targets (structured spheres only).
Eigen::MatrixX4cd apply_gamma(const PhysParams& p, Complex lam, const Surface& s,
                              const SurfaceDensity& phi,
                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                              KernelKind kind = KernelKind::Weyl, bool allow_near = false);

/// gamma(mu)^* f at the surface nodes (kernel G_{conj mu}(x - y)) by volume
/// quadrature with product-integrated cells near each node. The Krein
/// formula needs gamma(conj(lambda))^*, whose kernel is G_lambda.
SurfaceDensity apply_gamma_star(const PhysParams& p, Complex mu, const Surface& s,
                                const Eigen::MatrixX4cd& f_vals, const VolumeGrid& g,
                                KernelKind kind = KernelKind::Weyl, int rings = 2);

/// (A_0 - lambda)^{-1} f at targets by volume quadrature (self cell skipped,
/// near cells product-integrated).
Eigen::MatrixX4cd free_resolvent_apply(const PhysParams& p, Complex lam, const VolumeField& f,
                                       const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                       const VolumeGrid& g, KernelKind kind = KernelKind::Weyl,
                                       int rings = 3);

struct ResolventRequest {
  PhysParams p;
  Complex lambda;  // non-real
  VolumeField f;
  Eigen::Matrix<double, Eigen::Dynamic, 3> targets;
  VolumeGrid grid;
  KernelKind kind = KernelKind::Weyl;  // Shifted for the nonrelativistic comparison
  AssembleOptions assemble;
  double condition_guard = 1e12;
};

/// Krein formula: free part minus gamma(lam) (I + eta M(lam))^{-1} eta gamma(conj lam)^* f.
Eigen::MatrixX4cd dirac_resolvent_apply(const ResolventRequest& req, const Surface& s);

/// Same pipeline with kernel K_lambda P+ (values in the upper components).
Eigen::MatrixX4cd schrodinger_resolvent_apply(double m, double eta, Complex lam,
                                              const VolumeField& f,
                                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                              const VolumeGrid& g, const Surface& s,
                                              const AssembleOptions& opt = {});

struct NonrelRow {
  double c = 0.0;
  double deviation_M = 0.0;          // ||M(lam + mc^2) - Mtilde(lam) P+||_2
  double deviation_resolvent = 0.0;  // max_t |R_dirac(lam+mc^2) - R_schrodinger(lam)|
};

struct NonrelResult {
  std::vector<NonrelRow> rows;
  double slope_M = 0.0;  // log-log fit of deviation_M vs c
};

NonrelResult nonrel_limit_experiment(double m, double eta, Complex lam,
                                     const std::vector<double>& c_list,
                                     std::shared_ptr<const Surface> s, const VolumeField& f,
                                     const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                     const VolumeGrid& g, const AssembleOptions& opt = {});

}  // namespace dsh
