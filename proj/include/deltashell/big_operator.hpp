#pragma once

#include <vector>

#include "deltashell/assemble.hpp"

namespace dsh {

/// Matrix-free form of the weighted-symmetrized M_N(lambda) for real lambda
/// in the gap on a structured sphere, for sizes where the dense matrix does
/// not fit in memory. Far field is cached as five real scalars per node
/// pair; the product-integrated near field is stored as sparse 4x4 blocks.
class BigWeylOperator {
 public:
  BigWeylOperator(const PhysParams& p, double lam, std::shared_ptr<const Surface> s,
                  const AssembleOptions& opt = {});

  Eigen::Index dim() const { return 4 * Eigen::Index(N_); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

 private:
  int N_ = 0;
  // far-field per ordered pair (i,j), row-major, zeroed on the diagonal and
  // inside the near window: diag-upper scalar, diag-lower scalar, alpha part
  std::vector<double> s1_, s2_, va0_, va1_, va2_;
  std::vector<std::vector<std::pair<int, Mat4>>> near_;  // symmetrized blocks
};

}  // namespace dsh
