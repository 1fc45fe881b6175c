#include "deltashell/schur.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsh {

namespace {
constexpr double kPi = std::numbers::pi;
}

double volume_constant(double s_exp, double R, double kappa2) {
  if (!(s_exp < 3.0)) throw std::domain_error("volume_constant: s >= 3 diverges");
  if (!(s_exp > 0.0) || !(R > 0.0) || !(kappa2 > 0.0))
    throw std::invalid_argument("volume_constant: parameters must be positive");
  const double ball = 4.0 * kPi * std::pow(R, 3.0 - s_exp) / (3.0 - s_exp);
  const double tail = 4.0 * kPi * std::exp(-kappa2 * R) *
                      (R * R / kappa2 + 2.0 * R / (kappa2 * kappa2) +
                       2.0 / (kappa2 * kappa2 * kappa2));
  return ball + tail;
}

double surface_constant(double s_exp, const Surface& surf) {
  if (!(s_exp < 2.0)) throw std::domain_error("surface_constant: s >= 2 diverges on a surface");
  if (!(s_exp > 0.0)) throw std::invalid_argument("surface_constant: s must be positive");
  double best = 0.0;
  for (Eigen::Index i = 0; i < surf.size(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < surf.size(); ++j) {
      if (j == i) continue;
      const double d = (surf.nodes.row(i) - surf.nodes.row(j)).norm();
      acc += surf.weights(j) * (1.0 + std::pow(d, -s_exp));
    }
    best = std::max(best, acc);
  }
  return best;
}

NormCertificate certify_operator_norm(CertKind kind, const KernelBoundParams& kb,
                                      const Surface& surf) {
  if (!(kb.kappa1 >= 0.0)) throw std::invalid_argument("certify: kappa1 must be >= 0");
  NormCertificate cert;
  cert.kappa1 = kb.kappa1;
  switch (kind) {
    case CertKind::VolumeConv: {
      cert.rule = "volume_conv";
      cert.K = volume_constant(2.0, kb.R, kb.kappa2);
      cert.bound = kb.kappa1 * cert.K;
      break;
    }
    case CertKind::SurfToVol: {
      if (!(kb.s > 0.0 && kb.s < 1.0))
        throw std::invalid_argument("certify: interpolation exponent s must lie in (0,1)");
      cert.rule = "surf_to_vol";
      // kappa3: e^{-k2 |x|} <= kappa3 |x|^{-(2-s)} for |x| >= R
      const double rstar = (2.0 - kb.s) / kb.kappa2;
      const double kappa3 = std::max(
          1.0, (rstar > kb.R) ? std::pow(rstar, 2.0 - kb.s) * std::exp(-(2.0 - kb.s))
                              : std::pow(kb.R, 2.0 - kb.s) * std::exp(-kb.kappa2 * kb.R));
      const double K1 = surface_constant(2.0 - kb.s, surf);
      const double K2 = volume_constant(2.0 + kb.s, kb.R, kb.kappa2);
      cert.K = std::sqrt(kappa3 * K1 * K2);
      cert.bound = kb.kappa1 * cert.K;
      break;
    }
    case CertKind::SurfToSurf: {
      cert.rule = "surf_to_surf";
      cert.K = surface_constant(1.0, surf);
      cert.bound = kb.kappa1 * cert.K;
      break;
    }
  }
  return cert;
}

}  // namespace dsh
