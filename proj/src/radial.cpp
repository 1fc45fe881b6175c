#include "deltashell/radial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsh {

namespace {
constexpr double kPi = std::numbers::pi;
}

double mod_sph_bessel_i(int l, double x) {
  return std::sqrt(kPi / (2.0 * x)) * std::cyl_bessel_i(l + 0.5, x);
}

double mod_sph_bessel_k(int l, double x) {
  return std::sqrt(kPi / (2.0 * x)) * std::cyl_bessel_k(l + 0.5, x);
}

double channel_determinant(const RadialChannel& ch, double lam) {
  if (ch.kappa == 0) throw std::invalid_argument("channel_determinant: kappa must be nonzero");
  const double m = ch.p.m, c = ch.p.c, a = ch.radius, eta = ch.p.eta;
  const double edge = m * c * c;
  if (!(std::abs(lam) < edge)) throw std::domain_error("channel_determinant: |lambda| >= mc^2");

  const double tau = std::sqrt((m * c) * (m * c) - lam * lam / (c * c));
  const int l = ch.kappa > 0 ? ch.kappa : -ch.kappa - 1;
  const int lp = ch.kappa > 0 ? ch.kappa - 1 : -ch.kappa;
  const double zeta = c * tau / (lam + m * c * c);
  const double x = tau * a;

  // interior regular / exterior decaying radial pairs (f, g)
  double fi = mod_sph_bessel_i(l, x), gi = zeta * mod_sph_bessel_i(lp, x);
  double fo = mod_sph_bessel_k(l, x), go = -zeta * mod_sph_bessel_k(lp, x);
  // column normalization for conditioning near the gap edges
  const double ni = std::hypot(fi, gi), no = std::hypot(fo, go);
  fi /= ni;
  gi /= ni;
  fo /= no;
  go /= no;

  // jump condition at r=a:  (eta/2)(f+ + f-) = -c (g+ - g-),
  //                         (eta/2)(g+ + g-) = +c (f+ - f-).
  const double h = 0.5 * eta;
  return (h * fi + c * gi) * (h * go + c * fo) - (h * fo - c * go) * (h * gi - c * fi);
}

std::vector<RadialRoot> sphere_bound_states_radial(double a, const PhysParams& p, int kappa_max,
                                                   int scan_points) {
  if (kappa_max < 1) throw std::invalid_argument("sphere_bound_states_radial: kappa_max >= 1");
  p.validate();
  std::vector<RadialRoot> roots;
  const double edge = p.gap_edge();
  const double lo = -0.9995 * edge, hi = 0.9995 * edge;
  for (int kk = 1; kk <= kappa_max; ++kk) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      RadialChannel ch{sgn * kk, a, p};
      double prev_lam = lo;
      double prev_val = channel_determinant(ch, prev_lam);
      for (int i = 1; i < scan_points; ++i) {
        const double lam = lo + (hi - lo) * double(i) / double(scan_points - 1);
        const double val = channel_determinant(ch, lam);
        if (prev_val == 0.0) {
          roots.push_back({ch.kappa, prev_lam, 2 * kk});
        } else if (prev_val * val < 0.0) {
          double x0 = prev_lam, x1 = lam, f0 = prev_val;
          for (int it = 0; it < 200 && (x1 - x0) > 1e-10; ++it) {
            const double mid = 0.5 * (x0 + x1);
            const double fm = channel_determinant(ch, mid);
            if (f0 * fm <= 0.0)
              x1 = mid;
            else {
              x0 = mid;
              f0 = fm;
            }
          }
          roots.push_back({ch.kappa, 0.5 * (x0 + x1), 2 * kk});
        }
        prev_lam = lam;
        prev_val = val;
      }
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const RadialRoot& x, const RadialRoot& y) { return x.lambda < y.lambda; });
  return roots;
}

}  // namespace dsh
