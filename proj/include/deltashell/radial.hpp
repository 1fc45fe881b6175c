#pragma once

#include <vector>

#include "deltashell/phys.hpp"

namespace dsh {

/// One spin-orbit channel of the spherical shell problem.
struct RadialChannel {
  int kappa = -1;  // nonzero integer
  double radius = 1.0;
  PhysParams p;
};

/// Modified spherical Bessel functions i_l(x) and k_l(x)
/// (sqrt(pi/2x) I_{l+1/2}, sqrt(pi/2x) K_{l+1/2}).
double mod_sph_bessel_i(int l, double x);
double mod_sph_bessel_k(int l, double x);

/// Matching determinant of the two-sided jump condition at r = a in channel
/// kappa; zeros in (-mc^2, mc^2) are the bound-state energies. Columns are
/// normalized, so only zeros and sign changes are meaningful.
double channel_determinant(const RadialChannel& ch, double lam);

struct RadialRoot {
  int kappa = 0;
  double lambda = 0.0;
  int degeneracy = 0;  // 2|kappa|
};

/// Scan all channels |kappa| <= kappa_max on a uniform lambda grid of
/// `scan_points` points spanning (-mc^2, mc^2) (endpoints trimmed) and
/// refine each sign change by bisection to 1e-10.
std::vector<RadialRoot> sphere_bound_states_radial(double a, const PhysParams& p, int kappa_max,
                                                   int scan_points = 2001);

}  // namespace dsh
