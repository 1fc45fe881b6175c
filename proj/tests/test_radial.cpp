#include <doctest.h>

#include <cmath>

#include "deltashell/radial.hpp"

using namespace dsh;

namespace {
// frozen 50-digit oracle roots for a=1, m=c=1, eta=-1.5
constexpr double kRootKm1 = 0.17842087824687422;
constexpr double kRootKm2 = 0.4291701819248637;
constexpr double kRootKp1 = 0.6402270970994877;
constexpr double kRootKp2 = 0.8070407225168647;
constexpr double kRootKm3 = 0.7227756928719206;
}  // namespace

TEST_CASE("modified spherical bessel functions against closed forms") {
  const double x = 1.3;
  CHECK(mod_sph_bessel_i(0, x) == doctest::Approx(std::sinh(x) / x).epsilon(1e-14));
  CHECK(mod_sph_bessel_i(1, x) ==
        doctest::Approx((x * std::cosh(x) - std::sinh(x)) / (x * x)).epsilon(1e-13));
  CHECK(mod_sph_bessel_k(0, x) ==
        doctest::Approx(M_PI / (2 * x) * std::exp(-x)).epsilon(1e-14));
  CHECK(mod_sph_bessel_k(1, x) ==
        doctest::Approx(M_PI / (2 * x) * std::exp(-x) * (1 + 1 / x)).epsilon(1e-13));
}

TEST_CASE("free shell has no bound states") {
  PhysParams p{1.0, 1.0, 0.0};
  auto roots = sphere_bound_states_radial(1.0, p, 3, 501);
  CHECK(roots.empty());
}

TEST_CASE("channel determinant is continuous in lambda") {
  RadialChannel ch{-1, 1.0, PhysParams{1.0, 1.0, -1.5}};
  double prev = channel_determinant(ch, -0.95);
  for (double lam = -0.95 + 1e-3; lam < 0.95; lam += 1e-3) {
    const double val = channel_determinant(ch, lam);
    CHECK(std::abs(val - prev) < 0.05);
    prev = val;
  }
}

TEST_CASE("oracle roots match the frozen high-precision fixtures") {
  PhysParams p{1.0, 1.0, -1.5};
  auto roots = sphere_bound_states_radial(1.0, p, 3);
  REQUIRE(roots.size() == 5);
  CHECK(roots[0].kappa == -1);
  CHECK(roots[0].degeneracy == 2);
  CHECK(std::abs(roots[0].lambda - kRootKm1) < 1e-9);
  CHECK(std::abs(roots[1].lambda - kRootKm2) < 1e-9);
  CHECK(roots[1].degeneracy == 4);
  CHECK(std::abs(roots[2].lambda - kRootKp1) < 1e-9);
  CHECK(std::abs(roots[3].lambda - kRootKm3) < 1e-9);
  CHECK(roots[3].degeneracy == 6);
  CHECK(std::abs(roots[4].lambda - kRootKp2) < 1e-9);
}

TEST_CASE("roots are invariant under scan-grid doubling") {
  PhysParams p{1.0, 1.0, -1.5};
  auto r1 = sphere_bound_states_radial(1.0, p, 2, 1001);
  auto r2 = sphere_bound_states_radial(1.0, p, 2, 2001);
  REQUIRE(r1.size() == r2.size());
  for (size_t i = 0; i < r1.size(); ++i) CHECK(std::abs(r1[i].lambda - r2[i].lambda) < 1e-9);
}

TEST_CASE("roots move continuously in eta") {
  PhysParams pa{1.0, 1.0, -1.5}, pb{1.0, 1.0, -1.52};
  auto ra = sphere_bound_states_radial(1.0, pa, 1, 801);
  auto rb = sphere_bound_states_radial(1.0, pb, 1, 801);
  REQUIRE(ra.size() == rb.size());
  for (size_t i = 0; i < ra.size(); ++i) CHECK(std::abs(ra[i].lambda - rb[i].lambda) < 0.05);
}

TEST_CASE("small coupling binds nothing") {
  PhysParams p{1.0, 1.0, -0.05};
  CHECK(sphere_bound_states_radial(1.0, p, 4, 1001).empty());
}
