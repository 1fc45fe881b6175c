#include "deltashell/dirac.hpp"

namespace dsh {

namespace {

std::array<Mat2, 3> make_pauli() {
  Mat2 s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, Complex(0, -1), Complex(0, 1), 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

std::array<Mat4, 3> make_alpha() {
  std::array<Mat4, 3> a;
  const auto& s = pauli();
  for (int j = 0; j < 3; ++j) {
    a[j].setZero();
    a[j].block<2, 2>(0, 2) = s[j];
    a[j].block<2, 2>(2, 0) = s[j];
  }
  return a;
}

Mat4 make_beta() {
  Mat4 b = Mat4::Zero();
  b.diagonal() << 1, 1, -1, -1;
  return b;
}

Mat4 make_p_plus() {
  Mat4 p = Mat4::Zero();
  p.diagonal() << 1, 1, 0, 0;
  return p;
}

}  // namespace

const std::array<Mat2, 3>& pauli() {
  static const auto s = make_pauli();
  return s;
}

const std::array<Mat4, 3>& alpha() {
  static const auto a = make_alpha();
  return a;
}

const Mat4& beta() {
  static const Mat4 b = make_beta();
  return b;
}

const Mat4& p_plus() {
  static const Mat4 p = make_p_plus();
  return p;
}

Mat4 alpha_dot(const Vec3& v) {
  const auto& a = alpha();
  return v[0] * a[0] + v[1] * a[1] + v[2] * a[2];
}

double anticommutation_defect() {
  std::array<Mat4, 4> g = {beta(), alpha()[0], alpha()[1], alpha()[2]};
  double worst = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      Mat4 r = g[j] * g[k] + g[k] * g[j];
      if (j == k) r -= 2.0 * Mat4::Identity();
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace dsh
