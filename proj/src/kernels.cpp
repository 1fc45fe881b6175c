#include "deltashell/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsh {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

void require_displacement(double r) {
  if (!(r > 0.0)) throw std::domain_error("kernel: zero displacement (singularity)");
}

// k(lambda) = sqrt(lambda^2/c^2 - (mc)^2), decaying branch.
Complex wavenumber(const PhysParams& p, Complex lam) {
  return branch_sqrt(lam * lam / (p.c * p.c) - (p.m * p.c) * (p.m * p.c));
}

// q(lam_nr) = sqrt(lam_nr^2/c^2 + 2 m lam_nr), the shifted-energy wave number.
Complex wavenumber_shifted(const PhysParams& p, Complex lam_nr) {
  return branch_sqrt(lam_nr * lam_nr / (p.c * p.c) + 2.0 * p.m * lam_nr);
}

void check_weyl_domain(const PhysParams& p, Complex lam) {
  if (is_real(lam) && std::abs(lam.real()) > p.gap_edge())
    throw std::domain_error("kernel: real lambda outside [-mc^2, mc^2]");
}
}  // namespace

KernelCoeffs kernel_coeffs(KernelKind kind, const PhysParams& p, Complex lam, double r) {
  KernelCoeffs out;
  const double c = p.c, m = p.m;
  switch (kind) {
    case KernelKind::Weyl: {
      const Complex k = wavenumber(p, lam);
      const Complex e = std::exp(kI * k * r) / (4.0 * kPi * r);
      out.sI = lam / (c * c) * e;
      out.sB = m * e;
      out.sA = (1.0 - kI * k * r) * kI / (c * r * r) * e;
      break;
    }
    case KernelKind::WeylDerivative: {
      const Complex k = wavenumber(p, lam);
      const Complex kp = lam / (c * c * k);  // dk/dlambda
      const Complex e = std::exp(kI * k * r) / (4.0 * kPi * r);
      const Complex sI = lam / (c * c) * e;
      const Complex sB = m * e;
      const Complex sA = (1.0 - kI * k * r) * kI / (c * r * r) * e;
      out.sI = e / (c * c) + kI * r * kp * sI;
      out.sB = kI * r * kp * sB;
      out.sA = kp / (c * r) * e + kI * r * kp * sA;
      break;
    }
    case KernelKind::EndpointPlus:
    case KernelKind::EndpointMinus: {
      const double sgn = (kind == KernelKind::EndpointPlus) ? 1.0 : -1.0;
      const double e = 1.0 / (4.0 * kPi * r);
      out.sI = sgn * m * e;
      out.sB = m * e;
      out.sA = kI / (c * r * r) * e;
      break;
    }
    case KernelKind::Schrodinger: {
      const Complex q = branch_sqrt(2.0 * m * lam);
      out.sP = 2.0 * m * std::exp(kI * q * r) / (4.0 * kPi * r);
      break;
    }
    case KernelKind::Shifted: {
      const Complex q = wavenumber_shifted(p, lam);
      const Complex e = std::exp(kI * q * r) / (4.0 * kPi * r);
      out.sI = lam / (c * c) * e;
      out.sP = 2.0 * m * e;
      out.sA = (1.0 - kI * q * r) * kI / (c * r * r) * e;
      break;
    }
  }
  return out;
}

Mat4 coeffs_to_matrix(const KernelCoeffs& k, const Vec3& x) {
  Mat4 out = Mat4::Zero();
  if (k.sI != 0.0) out += k.sI * Mat4::Identity();
  if (k.sB != 0.0) out += k.sB * beta();
  if (k.sP != 0.0) out += k.sP * p_plus();
  if (k.sA != 0.0) out += k.sA * alpha_dot(x);
  return out;
}

void apply_coeffs(const KernelCoeffs& k, const Vec3& x, const Vec4& v, Vec4& y) {
  y(0) += (k.sI + k.sB + k.sP) * v(0);
  y(1) += (k.sI + k.sB + k.sP) * v(1);
  y(2) += (k.sI - k.sB) * v(2);
  y(3) += (k.sI - k.sB) * v(3);
  if (k.sA != 0.0) {
    // alpha.x acts as offdiag(sigma.x, sigma.x)
    const Complex sx0 = k.sA * x[0], sx1 = k.sA * x[1], sx2 = k.sA * x[2];
    y(0) += sx2 * v(2) + sx0 * v(3) - kI * sx1 * v(3);
    y(1) += sx0 * v(2) + kI * sx1 * v(2) - sx2 * v(3);
    y(2) += sx2 * v(0) + sx0 * v(1) - kI * sx1 * v(1);
    y(3) += sx0 * v(0) + kI * sx1 * v(0) - sx2 * v(1);
  }
}

Kernel4 green_kernel(const PhysParams& p, Complex lam, const Vec3& x) {
  const double r = x.norm();
  require_displacement(r);
  const double edge = p.gap_edge();
  if (is_real(lam) && std::abs(std::abs(lam.real()) - edge) < 1e-14 * std::max(1.0, edge)) {
    const auto kind = lam.real() > 0 ? KernelKind::EndpointPlus : KernelKind::EndpointMinus;
    return {coeffs_to_matrix(kernel_coeffs(kind, p, lam, r), x), x};
  }
  check_weyl_domain(p, lam);
  return {coeffs_to_matrix(kernel_coeffs(KernelKind::Weyl, p, lam, r), x), x};
}

Kernel4 green_kernel_dlambda(const PhysParams& p, Complex lam, const Vec3& x) {
  const double r = x.norm();
  require_displacement(r);
  const double edge = p.gap_edge();
  if (is_real(lam) && std::abs(std::abs(lam.real()) - edge) < 1e-14 * std::max(1.0, edge))
    throw std::domain_error("green_kernel_dlambda: branch point at lambda = +-mc^2");
  check_weyl_domain(p, lam);
  return {coeffs_to_matrix(kernel_coeffs(KernelKind::WeylDerivative, p, lam, r), x), x};
}

Complex schrodinger_kernel(double m, Complex lam, const Vec3& x) {
  const double r = x.norm();
  require_displacement(r);
  if (is_real(lam) && lam.real() >= 0.0)
    throw std::domain_error("schrodinger_kernel: lambda on [0, inf)");
  return 2.0 * m * std::exp(kI * branch_sqrt(2.0 * m * lam) * r) / (4.0 * kPi * r);
}

Kernel4 schrodinger_kernel_lift(double m, Complex lam, const Vec3& x) {
  return {schrodinger_kernel(m, lam, x) * p_plus(), x};
}

Kernel4 green_kernel_shifted(const PhysParams& p, Complex lam_nr, const Vec3& x) {
  const double r = x.norm();
  require_displacement(r);
  return {coeffs_to_matrix(kernel_coeffs(KernelKind::Shifted, p, lam_nr, r), x), x};
}

Kernel4 nonrel_kernel_difference(const PhysParams& p, Complex lam_nr, const Vec3& x) {
  Kernel4 g = green_kernel_shifted(p, lam_nr, x);
  g.value -= schrodinger_kernel(p.m, lam_nr, x) * p_plus();
  return g;
}

KernelCoeffs weak_singular_coeffs(KernelKind kind, const PhysParams& p, Complex lam) {
  // Leading 1/(4 pi r) coefficient matrix of the even part of the kernel.
  KernelCoeffs out;
  const double c = p.c, m = p.m;
  switch (kind) {
    case KernelKind::Weyl:
      out.sI = lam / (c * c);
      out.sB = m;
      break;
    case KernelKind::WeylDerivative:
      out.sI = 1.0 / (c * c);
      break;
    case KernelKind::EndpointPlus:
      out.sI = m;
      out.sB = m;
      break;
    case KernelKind::EndpointMinus:
      out.sI = -m;
      out.sB = m;
      break;
    case KernelKind::Schrodinger:
      out.sP = 2.0 * m;
      break;
    case KernelKind::Shifted:
      out.sI = lam / (c * c);
      out.sP = 2.0 * m;
      break;
  }
  return out;
}

}  // namespace dsh
