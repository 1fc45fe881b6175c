#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace dsh {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

/// Pauli matrices sigma_1, sigma_2, sigma_3.
const std::array<Mat2, 3>& pauli();

/// Dirac matrices alpha_j = offdiag(sigma_j, sigma_j), j = 1,2,3.
const std::array<Mat4, 3>& alpha();

/// beta = diag(I2, -I2).
const Mat4& beta();

/// Projection onto the upper two spinor components, P+ = diag(I2, 0).
const Mat4& p_plus();

/// alpha . v = sum_j alpha_j v_j.
Mat4 alpha_dot(const Vec3& v);

/// Max entrywise defect of alpha_j alpha_k + alpha_k alpha_j - 2 delta_jk I4
/// over j,k in {0,..,3} with alpha_0 = beta. Zero for a correct algebra.
double anticommutation_defect();

}  // namespace dsh
