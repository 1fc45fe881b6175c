#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deltashell/kernels.hpp"

using namespace dsh;
namespace {
constexpr double kPi = std::numbers::pi;
const PhysParams kUnit{1.0, 1.0, 0.0};
}  // namespace

TEST_CASE("G_0 at unit displacement matches the closed form") {
  Mat4 g = green_kernel(kUnit, 0.0, Vec3(1, 0, 0)).value;
  Mat4 ref = std::exp(-1.0) / (4 * kPi) * (beta() + Complex(0, 2) * alpha()[0]);
  CHECK((g - ref).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("endpoint kernel G_{+mc^2} matches the closed form") {
  const double r = 0.7;
  Mat4 g = green_kernel(kUnit, 1.0, Vec3(r, 0, 0)).value;
  Mat4 ref = (beta() + Mat4::Identity() + Complex(0, 1) / r * alpha()[0]) / (4 * kPi * r);
  CHECK((g - ref).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("reference value at lambda=0.5, x=(2,0,0)") {
  // frozen from a 50-digit evaluation of the closed form
  Mat4 g = green_kernel(kUnit, 0.5, Vec3(2, 0, 0)).value;
  CHECK(g.norm() == doctest::Approx(0.024852525192316654883618750865).epsilon(1e-14));
}

TEST_CASE("derivative kernel matches central differences") {
  const Vec3 x(1, 0, 0);
  const double h = 1e-6, lam = 0.3;
  Mat4 fd = (green_kernel(kUnit, lam + h, x).value - green_kernel(kUnit, lam - h, x).value) /
            (2 * h);
  Mat4 an = green_kernel_dlambda(kUnit, lam, x).value;
  CHECK((fd - an).cwiseAbs().maxCoeff() / an.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("derivative kernel is continuous across lambda=0") {
  const Vec3 x(0.4, -0.8, 0.2);
  Mat4 a = green_kernel_dlambda(kUnit, -1e-7, x).value;
  Mat4 b = green_kernel_dlambda(kUnit, +1e-7, x).value;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6 * b.cwiseAbs().maxCoeff());
}

TEST_CASE("derivative kernel leading beta-diagonal term") {
  const Vec3 x(0.9, 0, 0);
  const double r = x.norm();
  const Complex k = branch_sqrt(Complex(0.3 * 0.3 - 1.0, 0));
  const Complex lead = std::exp(Complex(0, 1) * k * r) / (4 * kPi * r);
  Mat4 d = green_kernel_dlambda(kUnit, 0.3, x).value;
  // the I/c^2 term appears on the diagonal alongside O(r kp) corrections
  CHECK(std::abs(d(0, 0) - lead) < 0.6 * std::abs(lead));
}

TEST_CASE("schrodinger kernel value and decay") {
  CHECK(std::abs(schrodinger_kernel(1.0, -0.5, Vec3(0, 0, 1)) -
                 std::exp(-1.0) / (2 * kPi)) < 1e-16);
  // decay e^{-2|x|}/|x| for lambda=-2, m=1
  const double v1 = std::abs(schrodinger_kernel(1.0, -2.0, Vec3(5, 0, 0)));
  const double v2 = std::abs(schrodinger_kernel(1.0, -2.0, Vec3(10, 0, 0)));
  CHECK(v1 / v2 == doctest::Approx(2.0 * std::exp(2.0 * 5.0)).epsilon(1e-10));
}

TEST_CASE("schrodinger lift obeys the projection algebra") {
  Mat4 lift = schrodinger_kernel_lift(1.0, Complex(-0.3, 0.2), Vec3(0.5, 0.1, -0.2)).value;
  CHECK((p_plus() * lift * p_plus() - lift).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("hermitian symmetry of G_lambda at real lambda in the gap") {
  const Vec3 x(0.3, -0.2, 0.9);
  for (double lam : {-0.9, 0.0, 0.5, 0.9}) {
    Mat4 a = green_kernel(kUnit, lam, x).value;
    Mat4 b = green_kernel(kUnit, lam, -x).value;
    CHECK((a.adjoint() - b).cwiseAbs().maxCoeff() < 1e-16);
  }
}

TEST_CASE("adjoint identity G_lambda(x)^H = G_{conj lambda}(-x)") {
  const Vec3 x(0.3, -0.2, 0.9);
  const Complex lam(0.3, 0.5);
  Mat4 a = green_kernel(kUnit, lam, x).value.adjoint();
  Mat4 b = green_kernel(kUnit, std::conj(lam), -x).value;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("kernel decay and singularity order") {
  const double tau = std::sqrt(1.0 - 0.5 * 0.5);
  // decay rate ~ tau for |x| >= 1
  const double v1 = green_kernel(kUnit, 0.5, Vec3(3, 0, 0)).value.norm();
  const double v2 = green_kernel(kUnit, 0.5, Vec3(6, 0, 0)).value.norm();
  CHECK(std::log(v1 / v2) / 3.0 == doctest::Approx(tau).epsilon(0.15));
  // |x|^2 |G| bounded, |x| |G| divergent as |x| -> 0
  double prev = 0.0;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    const double g = green_kernel(kUnit, 0.5, Vec3(r, 0, 0)).value.cwiseAbs().maxCoeff();
    CHECK(r * r * g < 0.1);
    CHECK(r * g > prev);
    prev = r * g;
  }
}

TEST_CASE("shifted kernel agrees with the generic formula at moderate c") {
  PhysParams p{1.0, 8.0, 0.0};
  const Complex lam(0, 1);
  const Vec3 x(0.3, -0.2, 0.9);
  Mat4 a = green_kernel_shifted(p, lam, x).value;
  Mat4 b = green_kernel(p, lam + p.gap_edge(), x).value;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("nonrel difference halves when c doubles and vanishes at large c") {
  const Vec3 x(1, 0, 0);
  const Complex lam(0, 1);
  Mat4 d8 = nonrel_kernel_difference(PhysParams{1, 8, 0}, lam, x).value;
  Mat4 d16 = nonrel_kernel_difference(PhysParams{1, 16, 0}, lam, x).value;
  const double r = d8.cwiseAbs().maxCoeff() / d16.cwiseAbs().maxCoeff();
  CHECK(r > 1.5);
  CHECK(r < 2.5);
  Mat4 dbig = nonrel_kernel_difference(PhysParams{1, 4096, 0}, lam, x).value;
  CHECK(dbig.cwiseAbs().maxCoeff() < 1e-3);
  // lower-right 2x2 block of the P+ part of the shifted kernel is zero
  Mat4 lift = schrodinger_kernel_lift(1.0, lam, x).value;
  CHECK(lift.block<2, 2>(2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS(green_kernel(kUnit, 1.5, Vec3(1, 0, 0)));
  CHECK_THROWS(green_kernel(kUnit, 0.0, Vec3(0, 0, 0)));
  CHECK_THROWS(green_kernel_dlambda(kUnit, 1.0, Vec3(1, 0, 0)));
  CHECK_THROWS(schrodinger_kernel(1.0, 0.5, Vec3(1, 0, 0)));
}
