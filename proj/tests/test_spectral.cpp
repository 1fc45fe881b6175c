#include <doctest.h>

#include <cmath>

#include "deltashell/radial.hpp"
#include "deltashell/spectral.hpp"

using namespace dsh;

namespace {
const PhysParams kUnit{1.0, 1.0, 0.0};
std::shared_ptr<const Surface> sphere(int nt) {
  return std::make_shared<const Surface>(make_sphere(1.0, nt));
}
// frozen high-precision oracle root, (a=1, m=c=1, eta=-1.5, kappa=-1)
constexpr double kOracleRoot = 0.17842087824687422;
}  // namespace

TEST_CASE("eig_M basics: orthonormal vectors, degenerate zero case") {
  auto s = sphere(6);
  AssembledOperator op = assemble_M(kUnit, 0.0, s);
  EigResult er = eig_M(op, true);
  Eigen::MatrixXcd gram = er.vectors.adjoint() * er.vectors;
  CHECK((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
        1e-10);
  // zero-matrix guard
  AssembledOperator zero = op;
  zero.matrix.setZero();
  EigResult ez = eig_M(zero);
  CHECK(ez.values.cwiseAbs().maxCoeff() == 0.0);
  // non-hermitian input is an assembly-integrity error
  AssembledOperator bad = op;
  bad.matrix(0, 1) += Complex(0.1, 0.1);
  CHECK_THROWS(eig_M(bad));
}

TEST_CASE("pairing of the channel eigenvalues at lambda=0") {
  auto s = sphere(10);
  PairingReport rep = pairing_check(assemble_M(kUnit, 0.0, s));
  CHECK(rep.worst_defect_top10 < 0.05);
  // compactness proxy: the singular values of M^2 - I/4 decay across the
  // full spectrum (the quarter-index variant is blocked by the droop modes
  // of local quadrature; see the README limitations section)
  CHECK(rep.full_decay >= 10.0);
  for (Eigen::Index i = 1; i < rep.singular_values.size(); ++i)
    CHECK(rep.singular_values(i) <= rep.singular_values(i - 1));
}

TEST_CASE("spectral curve: determinism, monotone branches, bounds") {
  auto s = sphere(8);
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(9, -0.9, 0.9);
  SpectralCurve curve = scan_curves(kUnit, s, grid);
  CHECK(curve.monotonicity_violations == 0);
  // identical grid points give identical branches
  Eigen::VectorXd two(2);
  two << 0.25, 0.25;
  SpectralCurve c2 = scan_curves(kUnit, s, two);
  CHECK((c2.branches[0] - c2.branches[1]).cwiseAbs().maxCoeff() == 0.0);
  // grid outside the gap rejected
  Eigen::VectorXd badgrid(2);
  badgrid << -1.5, 0.0;
  CHECK_THROWS(scan_curves(kUnit, s, badgrid));
}

TEST_CASE("bound states against the radial oracle at n_theta=8") {
  PhysParams p{1.0, 1.0, -1.5};
  auto s = sphere(8);
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(21, -0.9, 0.9);
  SpectralCurve curve = scan_curves(p, s, grid);
  FindOptions fopt;
  fopt.compute_slopes = true;
  std::vector<BoundState> states = find_bound_states(p, s, curve, fopt);
  REQUIRE(!states.empty());
  // lowest root near the frozen oracle value (coarse grid: few times 1e-3)
  CHECK(std::abs(states.front().lambda_star - kOracleRoot) < 8e-3);
  // residual tolerance honored
  for (const auto& bs : states) CHECK(bs.residual <= 1e-8 * std::max(1.0, 1.0 / 1.5));
  // multiplicities on the sphere come in clusters of >= 2
  for (const auto& bs : states) CHECK(bs.multiplicity_estimate >= 2);
  // slopes positive (monotone branches)
  for (const auto& bs : states) CHECK(bs.branch_slope > 0.0);
  // no bound states outside the open gap
  for (const auto& bs : states) CHECK(std::abs(bs.lambda_star) < 1.0);
  // eta = 0 gives the empty set
  PhysParams p0{1.0, 1.0, 0.0};
  CHECK(find_bound_states(p0, s, curve).empty());
  // excluded coupling rejected
  PhysParams pex{1.0, 1.0, 2.0};
  CHECK_THROWS(find_bound_states(pex, s, curve));
}

TEST_CASE("root is stable under lambda-grid refinement") {
  PhysParams p{1.0, 1.0, -1.5};
  auto s = sphere(8);
  FindOptions fopt;
  std::vector<double> roots;
  for (int npts : {15, 29}) {
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(npts, -0.9, 0.9);
    SpectralCurve curve = scan_curves(p, s, grid);
    auto states = find_bound_states(p, s, curve, fopt);
    REQUIRE(!states.empty());
    roots.push_back(states.front().lambda_star);
  }
  CHECK(std::abs(roots[0] - roots[1]) < 1e-7);
}

TEST_CASE("M0 estimate and the no-binding thresholds") {
  auto s = sphere(8);
  Eigen::VectorXd grid11 = Eigen::VectorXd::LinSpaced(11, -1.0, 1.0);
  Eigen::VectorXd grid21 = Eigen::VectorXd::LinSpaced(21, -1.0, 1.0);
  M0Estimate m11 = estimate_M0(kUnit, s, grid11);
  M0Estimate m21 = estimate_M0(kUnit, s, grid21);
  CHECK(m11.value >= 1.0 / 2.0 - 0.05);                       // clusters at 1/(2c)
  CHECK(std::abs(m11.value - m21.value) / m11.value < 0.02);  // grid-refinement stability
  // small-coupling threshold: no crossings for |eta| < 1/M0 (here eta = 0.5/M0)
  PhysParams p{1.0, 1.0, 0.5 / m11.value};
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(21, -0.9, 0.9);
  SpectralCurve curve = scan_curves(p, s, grid);
  CHECK(find_bound_states(p, s, curve).empty());
  // scaling smoke: doubling m keeps the estimate finite and positive
  PhysParams p2{2.0, 1.0, 0.0};
  Eigen::VectorXd grid2 = Eigen::VectorXd::LinSpaced(11, -2.0, 2.0);
  M0Estimate m2 = estimate_M0(p2, s, grid2);
  CHECK(m2.value > 0.0);
  CHECK(std::isfinite(m2.value));
}

TEST_CASE("trace formula internal consistency at n_theta=6") {
  PhysParams p{1.0, 1.0, 1.0};
  auto s = sphere(6);
  TraceCheckReport rep = trace_formula_check(p, s, Complex(0.3, 0.5));
  CHECK(rep.relative_gap < 1e-4);
  // eta = 0: both sides vanish
  PhysParams p0{1.0, 1.0, 0.0};
  TraceCheckReport rep0 = trace_formula_check(p0, s, Complex(0.3, 0.5));
  CHECK(std::abs(rep0.rhs) == 0.0);
  // conjugate lambda gives the conjugate value
  TraceCheckReport repc = trace_formula_check(p, s, Complex(0.3, -0.5));
  CHECK(std::abs(repc.rhs - std::conj(rep.rhs)) < 1e-6 * std::abs(rep.rhs));
}

TEST_CASE("eigenvalue count experiment rows are finite and consistent") {
  PhysParams base{1.0, 1.0, 0.0};
  auto s = sphere(6);
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(15, -0.9, 0.9);
  auto rows = eigenvalue_count_experiment(base, s, {-0.05, -1.5}, {1.0}, grid);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].count == 0);  // tiny |eta|: below the 1/M0 threshold
  CHECK(rows[1].count > 0);
  CHECK(rows[1].count < 100);  // finite
}

TEST_CASE("lanczos window matches the dense top of the spectrum") {
  auto s = sphere(8);
  AssembledOperator op = assemble_M(kUnit, 0.3, s);
  EigResult dense = eig_M(op);
  const Eigen::MatrixXcd& B = op.matrix;
  auto mv = [&B](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = B * x; };
  LanczosResult lr = lanczos_extreme(mv, B.rows(), 6, true);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(lr.values(i) - dense.values(dense.values.size() - 1 - i)) < 1e-9);
}
