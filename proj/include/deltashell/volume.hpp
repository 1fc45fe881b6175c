#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "deltashell/kernels.hpp"

namespace dsh {

/// Uniform midpoint tensor grid on the cube [-box, box]^3.
struct VolumeGrid {
  double box = 6.0;
  int n = 32;
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;
  double cell_weight = 0.0;  // h^3
  double h = 0.0;

  Eigen::Index size() const { return points.rows(); }
};

VolumeGrid make_volume_grid(double box, int n);

/// A 4-component volume field given as a callable.
using VolumeField = std::function<Vec4(const Vec3&)>;

/// Sample a field on the grid.
Eigen::MatrixX4cd sample_field(const VolumeField& f, const VolumeGrid& g);

/// y(t) = sum_k w G(t - y_k) f_k with the target's own cell skipped and the
/// cells within `rings` of each target integrated exactly against the nodal
/// value (product integration). f given by nodal values.
Eigen::MatrixX4cd volume_convolve(KernelKind kind, const PhysParams& p, Complex lam,
                                  const Eigen::MatrixX4cd& f_vals, const VolumeGrid& g,
                                  const Eigen::Matrix<double, Eigen::Dynamic, 3>& targets,
                                  int rings = 3, int gauss = 4);

}  // namespace dsh
