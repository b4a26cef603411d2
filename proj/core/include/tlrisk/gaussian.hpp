#pragma once

// Gaussian distribution algebra: joint (input, output) tasks, the optimal
// affine regressor of a task, affine pushforwards and the two divergences
// used throughout the library.

#include "tlrisk/linalg.hpp"

namespace tlrisk {

/// Multivariate normal N(mean, cov). The covariance may be rank deficient.
class GaussianDist {
 public:
  GaussianDist(Vector mean, Matrix cov);

  static GaussianDist scalar(double mean, double variance);

  Eigen::Index dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }

 private:
  Vector mean_;
  Matrix cov_;
};

/// Joint law of (X, Y) with X in R^d and Y in R^l, stored as one (d+l)
/// Gaussian. Blocks are views into that single covariance, so the YX block
/// is the transpose of the XY block by construction.
class GaussianJointTask {
 public:
  GaussianJointTask(Eigen::Index dim_x, Eigen::Index dim_y, Vector mean, Matrix cov);

  Eigen::Index dim_x() const noexcept { return dim_x_; }
  Eigen::Index dim_y() const noexcept { return dim_y_; }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }

  Vector mean_x() const { return mean_.head(dim_x_); }
  Vector mean_y() const { return mean_.tail(dim_y_); }
  Matrix cov_x() const { return cov_.topLeftCorner(dim_x_, dim_x_); }
  Matrix cov_xy() const { return cov_.topRightCorner(dim_x_, dim_y_); }
  Matrix cov_yx() const { return cov_xy().transpose(); }
  Matrix cov_y() const { return cov_.bottomRightCorner(dim_y_, dim_y_); }

  GaussianDist input_law() const { return GaussianDist(mean_x(), cov_x()); }
  GaussianDist joint_law() const { return GaussianDist(mean_, cov_); }

 private:
  Eigen::Index dim_x_;
  Eigen::Index dim_y_;
  Vector mean_;
  Matrix cov_;
};

/// f(x) = weight * x + intercept, weight is (l x d).
struct AffineModel {
  Matrix weight;
  Vector intercept;

  Eigen::Index input_dim() const noexcept { return weight.cols(); }
  Eigen::Index output_dim() const noexcept { return weight.rows(); }
  Vector operator()(const Vector& x) const { return weight * x + intercept; }
};

/// Composition outer(inner(x)).
AffineModel compose(const AffineModel& outer, const AffineModel& inner);

/// Minimizer of E||Y - f(X)||^2 over affine f. Throws SingularInputCovariance
/// when the input block cannot be factorized.
AffineModel fit_optimal_affine(const GaussianJointTask& task);

/// Law of model(X) for X ~ N(input_mean, input_cov).
GaussianDist pushforward_affine(const AffineModel& model, const Vector& input_mean,
                                const Matrix& input_cov);
GaussianDist pushforward_affine(const AffineModel& model, const GaussianDist& input);

/// KL(p || q). The reference q must have a factorizable covariance
/// (SingularReference otherwise); p may be degenerate only in the sense
/// that log det p is then -inf and the divergence is reported as +inf.
double kl_gaussian(const GaussianDist& p, const GaussianDist& q);

/// Squared 2-Wasserstein distance (Bures form)
///   ||m_p - m_q||^2 + tr(S_p + S_q - 2 (S_p^1/2 S_q S_p^1/2)^1/2).
double w2sq_gaussian(const GaussianDist& p, const GaussianDist& q);

}  // namespace tlrisk
