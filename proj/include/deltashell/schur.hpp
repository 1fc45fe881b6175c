#pragma once

#include <string>

#include "deltashell/surface.hpp"

namespace dsh {

/// Upper bound on an integral operator norm assembled from a Schur-test
/// constant: bound = kappa1 * K.
struct NormCertificate {
  double bound = 0.0;
  double kappa1 = 0.0;
  double K = 0.0;
  std::string rule;
};

/// K = int_R3 tau(x - y) dy for tau = |x|^{-s} (|x| < R), e^{-kappa2 |x|}
/// (|x| >= R), in closed form. s >= 3 diverges.
double volume_constant(double s_exp, double R, double kappa2);

/// Discrete sup over nodes of sum_{j != i} w_j (1 + |x_i - x_j|^{-s}).
/// s >= 2 diverges on a surface.
double surface_constant(double s_exp, const Surface& surf);

enum class CertKind { VolumeConv, SurfToVol, SurfToSurf };

struct KernelBoundParams {
  double kappa1 = 0.0;  // prefactor of the kernel bound
  double kappa2 = 1.0;  // exponential tail rate
  double R = 1.0;       // near/far split radius
  double s = 0.5;       // interpolation exponent for SurfToVol, in (0,1)
};

/// Schur-test certificates:
///  - VolumeConv:  |t| <= k1 (|x|^-2 near, e^{-k2|x|} far)  ->  ||T|| <= k1 K_vol(2)
///  - SurfToVol:   same bound, mixed exponents (2-s, 2+s)   ->  ||T|| <= k1 sqrt(k3 K1 K2)
///  - SurfToSurf:  |t| <= k1 (1 + |x|^-1)                   ->  ||T|| <= k1 K_surf(1)
NormCertificate certify_operator_norm(CertKind kind, const KernelBoundParams& kb,
                                      const Surface& surf);

}  // namespace dsh
