#pragma once

#include "deltashell/dirac.hpp"
#include "deltashell/phys.hpp"

namespace dsh {

/// Which matrix-valued kernel to evaluate.
enum class KernelKind {
  Weyl,            // G_lambda
  WeylDerivative,  // d/dlambda G_lambda
  EndpointPlus,    // G_{+mc^2}
  EndpointMinus,   // G_{-mc^2}
  Schrodinger,     // K_lambda P+
  Shifted,         // G_{lambda + mc^2}, evaluated cancellation-free
};

/// Kernel value decomposed over the commuting coefficient structure
///   K(x) = sI * I4 + sB * beta + sP * P+ + sA * (alpha . x).
/// sA multiplies the raw displacement (not the unit vector).
struct KernelCoeffs {
  Complex sI{0, 0}, sB{0, 0}, sP{0, 0}, sA{0, 0};
};

/// Coefficients at distance r > 0. For Shifted/Schrodinger, `lam` is the
/// nonrelativistic energy (the shift by mc^2 is internal to the formula).
KernelCoeffs kernel_coeffs(KernelKind kind, const PhysParams& p, Complex lam, double r);

/// Assemble the 4x4 kernel value from coefficients and displacement.
Mat4 coeffs_to_matrix(const KernelCoeffs& k, const Vec3& x);

/// y += K(x) v without forming the 4x4 matrix.
void apply_coeffs(const KernelCoeffs& k, const Vec3& x, const Vec4& v, Vec4& y);

struct Kernel4 {
  Mat4 value;
  Vec3 displacement;
};

/// G_lambda(x). Endpoints lambda = +-mc^2 dispatch to the limiting formulas;
/// real lambda strictly outside the gap is a domain error; x = 0 is a
/// singularity error.
Kernel4 green_kernel(const PhysParams& p, Complex lam, const Vec3& x);

/// d/dlambda G_lambda(x), analytic form. lambda = +-mc^2 is a branch-point error.
Kernel4 green_kernel_dlambda(const PhysParams& p, Complex lam, const Vec3& x);

/// Scalar K_lambda(x) = 2m e^{i sqrt(2 m lambda)|x|} / (4 pi |x|), lambda off [0,inf).
Complex schrodinger_kernel(double m, Complex lam, const Vec3& x);

/// The 4x4 lift K_lambda(x) P+.
Kernel4 schrodinger_kernel_lift(double m, Complex lam, const Vec3& x);

/// G_{lambda + mc^2}(x) evaluated through lambda^2/c^2 + 2 m lambda (no
/// cancellation at large c).
Kernel4 green_kernel_shifted(const PhysParams& p, Complex lam_nr, const Vec3& x);

/// G_{lambda + mc^2}(x) - K_lambda(x) P+, exact difference.
Kernel4 nonrel_kernel_difference(const PhysParams& p, Complex lam_nr, const Vec3& x);

/// Diagonal (own-cell) correction coefficients: the kernel's even weakly
/// singular part integrates over a node-centered patch to
///   [coefficient matrix] * (I1 + i q * I0 / (4 pi)),
/// where I1 = int_patch dsigma/(4 pi |y|), I0 = patch area, and q is the
/// kernel's wave number. Returns the coefficient structure with sA = 0 and
/// the scalars premultiplied. Used by the plain DiagonalExclusion fallback
/// and by small analyses; the product-integration path does not need it.
KernelCoeffs weak_singular_coeffs(KernelKind kind, const PhysParams& p, Complex lam);

}  // namespace dsh
