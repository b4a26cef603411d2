#include "tlrisk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tlrisk {

double max_asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_covariance(const Matrix& cov, std::string_view what) {
  const std::string name(what);
  require(cov.rows() == cov.cols(), ErrorKind::DimensionMismatch, name + " must be square");
  require(cov.allFinite(), ErrorKind::InvalidArgument, name + " has non-finite entries");
  require(max_asymmetry(cov) <= kSymmetryTol, ErrorKind::NotSymmetric,
          name + " asymmetry exceeds 1e-10");
  if (cov.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(cov), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  require(lo >= -kPsdRelTol * std::max(hi, 0.0), ErrorKind::NotPositiveSemidefinite,
          name + " has eigenvalue " + std::to_string(lo));
}

SpdFactor::SpdFactor(const Matrix& a, ErrorKind on_failure, std::string_view what) {
  require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, std::string(what) + " must be square");
  llt_.compute(a);
  if (llt_.info() == Eigen::Success) return;
  const double n = static_cast<double>(a.rows());
  const double jitter = 1e-10 * a.trace() / n;
  if (jitter > 0.0) {
    Matrix b = a;
    b.diagonal().array() += jitter;
    llt_.compute(b);
    jittered_ = true;
    if (llt_.info() == Eigen::Success) return;
  }
  fail(on_failure, std::string(what) + " is not positive definite");
}

double SpdFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Matrix sym_sqrt(const Matrix& a) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(a));
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double kl_covariance_term(const Matrix& p, const Eigen::LLT<Matrix>& q_factor) {
  const auto l = q_factor.matrixL();
  const Matrix half = l.solve(p);
  const Matrix whitened = symmetrized(l.solve(half.transpose()));
  const Vector lambda = Eigen::SelfAdjointEigenSolver<Matrix>(whitened, Eigen::EigenvaluesOnly).eigenvalues();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0)) return std::numeric_limits<double>::infinity();
    const double e = lambda[i] - 1.0;
    sum += e - std::log1p(e);
  }
  return 0.5 * sum;
}

double bures_sq(const Matrix& a, const Matrix& b) {
  const Matrix product = sym_sqrt(b) * sym_sqrt(a);
  const double nuclear = Eigen::JacobiSVD<Matrix>(product).singularValues().sum();
  return std::max(a.trace() + b.trace() - 2.0 * nuclear, 0.0);
}

}  // namespace tlrisk
