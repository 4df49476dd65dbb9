#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace irsnoma {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Numerical thresholds shared by the feasibility predicates and the
/// optimizers. Tests may construct their own copy to tighten or relax them.
struct Tolerances {
  double qd_margin = 1e-9;            // quasi-degradation margin (absolute, dimensionless)
  double improved_qd_rel = 1e-9;      // lambda_max(Y1 - Y2) >= -rel * ||Y1 - Y2||_F
  double lmi_psd_rel = 1e-8;          // min eig of the LMI matrix >= -rel * scale
  double orthogonality_rel = 1e-10;   // ||R||_F <= rel * sqrt(||Y1||_F ||Y2||_F)
  double zero_channel = 1e-30;        // squared-norm floor for "nonzero" channels
  double collinear_sin2 = 1e-10;      // sin^2(alpha) at or below this is collinear
  double rank_one_ratio = 1e-6;       // lambda_2 <= ratio * lambda_max counts as rank one
  double degenerate_trace = 1e-30;    // Tr(Q Y_k) floor
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Smallest eigenvalue of a Hermitian matrix (the input is symmetrized first).
double min_eigenvalue(const CMatrix& h);
/// Largest eigenvalue of a Hermitian matrix (the input is symmetrized first).
double max_eigenvalue(const CMatrix& h);

/// Re Tr(A B); the real inner product <A^H, B> used for Hermitian data.
inline double re_trace(const CMatrix& a, const CMatrix& b) {
  // Tr(AB) = sum_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum().real();
}

inline Complex trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace irsnoma
