#pragma once

#include <Eigen/Dense>
#include <memory>

#include "deltashell/kernels.hpp"
#include "deltashell/surface.hpp"

namespace dsh {

enum class OperatorKind { WeylM, WeylMDerivative, SchrodingerM, ShiftedM };

/// How the singular near field is discretized.
///  - DiagonalExclusion: block (i,j) = w_j K(x_i - x_j) for i != j, zero
///    diagonal blocks (the plain Nystrom rule).
///  - ProductIntegration: same far field, but cells within a parameter
///    window around each node are integrated exactly against a P1 density
///    model, the own cell as a principal value (paired-quadrant Duffy).
///    Requires a structured sphere grid; this is the accuracy-bearing path.
enum class PvPolicy { DiagonalExclusion, ProductIntegration };

struct AssembledOperator {
  Complex lambda;
  OperatorKind kind = OperatorKind::WeylM;
  PvPolicy pv_policy = PvPolicy::ProductIntegration;
  Eigen::MatrixXcd matrix;  // weighted-symmetrized: B = W^{1/2} A W^{-1/2}
  std::shared_ptr<const Surface> surface;
  PhysParams params;

  Eigen::Index dim() const { return matrix.rows(); }
  /// ||B - B^H||_F / ||B||_F.
  double hermiticity_residual() const;
};

struct AssembleOptions {
  PvPolicy policy = PvPolicy::ProductIntegration;
  int window = -1;     // near-field half-width in cells; -1 = min(8, max(3, n_theta/4))
  int gauss_near = 6;  // tensor-Gauss order on near cells
  int gauss_self = 8;  // per Duffy direction on the own cell
};

int default_window(int n_theta);

/// Nystrom matrix of M(lambda). lambda in the closed gap or non-real;
/// endpoints dispatch to the limiting kernels. Real lambda strictly outside
/// the gap is a domain error.
AssembledOperator assemble_M(const PhysParams& p, Complex lam,
                             std::shared_ptr<const Surface> s,
                             const AssembleOptions& opt = {});

/// Nystrom matrix of dM/dlambda (analytic kernel derivative).
AssembledOperator assemble_dM(const PhysParams& p, Complex lam,
                              std::shared_ptr<const Surface> s,
                              const AssembleOptions& opt = {});

/// Nystrom matrix of the Schrodinger comparison operator Mtilde(lambda) P+.
AssembledOperator assemble_M_schrodinger(double m, Complex lam,
                                         std::shared_ptr<const Surface> s,
                                         const AssembleOptions& opt = {});

/// Nystrom matrix of M(lambda + mc^2), evaluated cancellation-free.
AssembledOperator assemble_M_shifted(const PhysParams& p, Complex lam_nr,
                                     std::shared_ptr<const Surface> s,
                                     const AssembleOptions& opt = {});

/// Weighted operator norm ||B||_2 by power iteration (deterministic).
double operator_norm(const Eigen::MatrixXcd& B, int iters = 120);

namespace detail {
/// Shared assembly engine; `kind` selects the kernel, `lam` is the kernel's
/// spectral argument (nonrelativistic energy for Schrodinger/Shifted).
Eigen::MatrixXcd assemble_matrix(KernelKind kind, const PhysParams& p, Complex lam,
                                 const Surface& s, const AssembleOptions& opt);

/// Product-integrated near field: per row, accumulated 4x4 blocks (already
/// scaled by sqrt(w_i/w_j)) and the window columns whose far-field entries
/// they replace. Only valid for structured-sphere surfaces.
struct NearField {
  std::vector<std::vector<std::pair<Eigen::Index, Mat4>>> rows;
  std::vector<std::vector<Eigen::Index>> window_cols;
};
NearField near_field(KernelKind kind, const PhysParams& p, Complex lam, const Surface& s,
                     const AssembleOptions& opt);
}  // namespace detail

}  // namespace dsh
