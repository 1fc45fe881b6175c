#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "deltashell/assemble.hpp"

namespace dsh {

/// Full spectrum of the weighted-Hermitian discretization. Eigenvectors (if
/// requested) are orthonormal in the sigma-weighted inner product once
/// mapped back to nodal values (columns are W^{1/2}-representation vectors).
struct EigResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // empty unless requested
};

EigResult eig_M(const AssembledOperator& op, bool with_vectors = false,
                double herm_tol = 1e-8);

/// Lanczos with full reorthogonalization on a Hermitian operator given as a
/// matvec. Returns the `howmany` largest (or smallest) Ritz values, with
/// optional Ritz vectors and a warm-start vector.
struct LanczosResult {
  Eigen::VectorXd values;    // sorted: extreme end first
  Eigen::MatrixXcd vectors;  // matching columns
  int iterations = 0;
};

LanczosResult lanczos_extreme(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& matvec,
    Eigen::Index dim, int howmany, bool largest, int max_iter = 180, double tol = 1e-11,
    const Eigen::VectorXcd* warm_start = nullptr);

/// Spectral window used by the large-N curve scan: the `count` branches
/// nearest `center`, taken from the `largest`-end Lanczos spectrum.
struct WindowSpec {
  double center = 0.0;
  int count = 8;
};

struct SpectralCurve {
  Eigen::VectorXd lambda_grid;
  std::vector<Eigen::VectorXd> branches;  // per grid point, ascending
  bool windowed = false;
  int monotonicity_violations = 0;  // linked-branch decreases beyond slack
  double worst_decrease = 0.0;      // most negative linked step
  double norm_scale = 0.0;          // max |mu| seen (slack reference)
};

struct ScanOptions {
  AssembleOptions assemble;
  std::optional<WindowSpec> window;  // required when 4N exceeds dense limit
  Eigen::Index dense_limit = 6500;
  double slack_factor = 1e-6;  // monotonicity slack = factor * norm_scale
};

SpectralCurve scan_curves(const PhysParams& p, std::shared_ptr<const Surface> s,
                          const Eigen::VectorXd& lambda_grid, const ScanOptions& opt = {});

struct BoundState {
  double lambda_star = 0.0;
  int branch_index = 0;
  double residual = 0.0;  // |mu(lambda*) + 1/eta|
  int multiplicity_estimate = 1;
  double branch_slope = 0.0;  // v^H (dM/dlambda) v at the root (0 if not computed)
};

struct FindOptions {
  AssembleOptions assemble;
  double lambda_tol = 1e-10;
  double residual_tol_scale = 1e-8;  // residual <= scale * max(1, 1/|eta|)
  int max_refine = 80;
  bool compute_slopes = false;
  Eigen::Index dense_limit = 2600;  // above this, refinement tracks a Lanczos window
};

/// Brackets sign changes of mu_n(lambda) + 1/eta on the linked branches and
/// refines each by safeguarded false position on freshly assembled M(lambda).
/// eta = 0 returns the empty set; eta = +-2c is an error.
std::vector<BoundState> find_bound_states(const PhysParams& p, std::shared_ptr<const Surface> s,
                                          const SpectralCurve& curve, const FindOptions& opt = {});

/// Refine a single branch root inside [lo, hi], tracking the eigenvalue
/// nearest -1/eta. Works at any N (windowed Lanczos above the dense limit).
BoundState refine_bound_state(const PhysParams& p, std::shared_ptr<const Surface> s, double lo,
                              double hi, const FindOptions& opt = {});

struct M0Estimate {
  double value = 0.0;
  Eigen::VectorXd grid;
  std::string surface;
};

/// sup over the grid (must cover [-mc^2, mc^2] with endpoints) of ||M(lambda)||.
M0Estimate estimate_M0(const PhysParams& p, std::shared_ptr<const Surface> s,
                       const Eigen::VectorXd& grid, const ScanOptions& opt = {});

struct PairingReport {
  double worst_defect_top10 = 0.0;    // relative defect of (mu, -1/(4c^2 mu))
  double cluster_fraction_005 = 0.0;  // fraction of eigenvalues within 0.05 of +-1/(2c)
  Eigen::VectorXd singular_values;    // of M^2 - I/(4c^2), descending
  double tail_decay = 0.0;            // sigma(1) / sigma(N) with N = dim/4
  double full_decay = 0.0;            // sigma(1) / sigma(end)
};

PairingReport pairing_check(const AssembledOperator& op);

struct TraceCheckReport {
  Complex rhs = 0.0;        // -1/2 tr d^2/dlambda^2 [(I+eta M)^-1 eta dM], analytic inner derivative
  Complex lhs_proxy = 0.0;  // same with the inner derivative by central differences
  double relative_gap = 0.0;
  double condition_estimate = 0.0;
};

TraceCheckReport trace_formula_check(const PhysParams& p, std::shared_ptr<const Surface> s,
                                     Complex lam, const AssembleOptions& opt = {});

struct CountRow {
  double eta = 0.0;
  double c = 0.0;
  int count = 0;
};

std::vector<CountRow> eigenvalue_count_experiment(const PhysParams& base,
                                                  std::shared_ptr<const Surface> s,
                                                  const std::vector<double>& eta_list,
                                                  const std::vector<double>& c_list,
                                                  const Eigen::VectorXd& lambda_grid,
                                                  const FindOptions& opt = {});

/// Condition-number estimate (2-norm) of a general square matrix via power
/// iterations on A^H A and inverse iterations through an LU factorization.
double condition_estimate(const Eigen::MatrixXcd& A, int iters = 30);

}  // namespace dsh
