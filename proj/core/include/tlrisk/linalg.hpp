#pragma once

// Dense symmetric linear algebra shared by the Gaussian, regression and
// portfolio modules.

#include <Eigen/Dense>

#include "tlrisk/errors.hpp"

namespace tlrisk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdRelTol = 1e-8;

double max_asymmetry(const Matrix& m);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Matrix& m);

/// Throws NotSymmetric / NotPositiveSemidefinite when the matrix is outside
/// the GaussianDist covariance contract.
void check_covariance(const Matrix& cov, std::string_view what);

/// Cholesky factor of a symmetric matrix. On failure retries once with
/// jitter 1e-10 * trace / n added to the diagonal, then throws `on_failure`.
class SpdFactor {
 public:
  SpdFactor(const Matrix& a, ErrorKind on_failure, std::string_view what);

  Vector solve(const Vector& b) const { return llt_.solve(b); }
  Matrix solve(const Matrix& b) const { return llt_.solve(b); }
  double log_det() const;
  Matrix lower() const { return llt_.matrixL(); }
  bool jittered() const noexcept { return jittered_; }

 private:
  Eigen::LLT<Matrix> llt_;
  bool jittered_ = false;
};

/// Principal square root of a symmetric PSD matrix; negative round-off
/// eigenvalues are clamped to zero.
Matrix sym_sqrt(const Matrix& a);

/// Returns (a + a^T) / 2.
Matrix symmetrized(const Matrix& a);

/// (tr(Q^-1 P) - n - log det(Q^-1 P)) / 2 for SPD P and the Cholesky factor
/// of Q, summed over the eigenvalues of L^-1 P L^-T so that its error is
/// second order when P is close to Q.
double kl_covariance_term(const Matrix& p, const Eigen::LLT<Matrix>& q_factor);

/// Squared Bures distance tr A + tr B - 2 tr (A^1/2 B A^1/2)^1/2 for
/// symmetric PSD A and B. The last trace is taken as the nuclear norm of
/// B^1/2 A^1/2, which avoids squaring small eigenvalues.
double bures_sq(const Matrix& a, const Matrix& b);

}  // namespace tlrisk
