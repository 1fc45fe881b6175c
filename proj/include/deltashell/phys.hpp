#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dsh {

/// Mass, speed of light (hbar = 1) and coupling strength of the shell.
struct PhysParams {
  double m = 1.0;
  double c = 1.0;
  double eta = 0.0;

  double gap_edge() const { return m * c * c; }  // mc^2

  void validate() const {
    if (!(m > 0.0)) throw std::invalid_argument("PhysParams: m must be > 0");
    if (!(c > 0.0)) throw std::invalid_argument("PhysParams: c must be > 0");
  }
  /// eta = +-2c is excluded wherever a self-adjoint shell operator is required.
  bool eta_excluded(double tol = 1e-14) const {
    return std::abs(std::abs(eta) - 2.0 * c) <= tol * std::max(1.0, 2.0 * c);
  }
};

/// Square root with the branch Im sqrt >= 0, and sqrt(x) >= 0 for x >= 0.
inline std::complex<double> branch_sqrt(std::complex<double> z) {
  std::complex<double> w = std::sqrt(z);
  if (w.imag() < 0.0) w = -w;
  return w;
}

inline bool is_real(std::complex<double> z, double tol = 0.0) {
  return std::abs(z.imag()) <= tol;
}

/// lambda lies in the closed spectral gap [-mc^2, mc^2] (real).
inline bool in_closed_gap(const PhysParams& p, std::complex<double> lam) {
  return is_real(lam) && std::abs(lam.real()) <= p.gap_edge();
}

/// lambda in the resolvent set of the free operator: not real with |Re| >= mc^2.
inline bool in_resolvent_set(const PhysParams& p, std::complex<double> lam) {
  return !is_real(lam) || std::abs(lam.real()) < p.gap_edge();
}

}  // namespace dsh
