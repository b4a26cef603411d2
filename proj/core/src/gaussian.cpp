#include "tlrisk/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tlrisk {

GaussianDist::GaussianDist(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  require(mean_.size() >= 1, ErrorKind::InvalidArgument, "Gaussian dimension must be positive");
  require(cov_.rows() == mean_.size() && cov_.cols() == mean_.size(), ErrorKind::DimensionMismatch,
          "covariance is " + std::to_string(cov_.rows()) + "x" + std::to_string(cov_.cols()) +
              " for mean of length " + std::to_string(mean_.size()));
  require(mean_.allFinite(), ErrorKind::InvalidArgument, "mean has non-finite entries");
  check_covariance(cov_, "covariance");
}

GaussianDist GaussianDist::scalar(double mean, double variance) {
  return GaussianDist(Vector::Constant(1, mean), Matrix::Constant(1, 1, variance));
}

GaussianJointTask::GaussianJointTask(Eigen::Index dim_x, Eigen::Index dim_y, Vector mean, Matrix cov)
    : dim_x_(dim_x), dim_y_(dim_y), mean_(std::move(mean)), cov_(std::move(cov)) {
  require(dim_x_ >= 1 && dim_y_ >= 1, ErrorKind::InvalidArgument, "task dimensions must be positive");
  const Eigen::Index n = dim_x_ + dim_y_;
  require(mean_.size() == n, ErrorKind::DimensionMismatch,
          "task mean must have length dim_x + dim_y = " + std::to_string(n));
  require(cov_.rows() == n && cov_.cols() == n, ErrorKind::DimensionMismatch,
          "task covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  require(mean_.allFinite(), ErrorKind::InvalidArgument, "task mean has non-finite entries");
  check_covariance(cov_, "task covariance");
  // Store an exactly symmetric matrix so the YX block is the transpose of XY.
  cov_ = symmetrized(cov_);
  require(min_eigenvalue(cov_x()) > 1e-10, ErrorKind::SingularInputCovariance,
          "input covariance block is not strictly positive definite");
}

AffineModel compose(const AffineModel& outer, const AffineModel& inner) {
  require(outer.input_dim() == inner.output_dim(), ErrorKind::DimensionMismatch,
          "cannot compose affine maps of incompatible shapes");
  return AffineModel{outer.weight * inner.weight, outer.weight * inner.intercept + outer.intercept};
}

AffineModel fit_optimal_affine(const GaussianJointTask& task) {
  const SpdFactor sx(task.cov_x(), ErrorKind::SingularInputCovariance, "input covariance");
  // w (d x l) solves S_X w = S_XY; stored transposed as an (l x d) weight.
  const Matrix w = sx.solve(task.cov_xy());
  AffineModel model;
  model.weight = w.transpose();
  model.intercept = task.mean_y() - model.weight * task.mean_x();
  return model;
}

GaussianDist pushforward_affine(const AffineModel& model, const Vector& input_mean, const Matrix& input_cov) {
  require(model.intercept.size() == model.output_dim(), ErrorKind::DimensionMismatch,
          "intercept length does not match weight rows");
  require(input_mean.size() == model.input_dim() && input_cov.rows() == model.input_dim() &&
              input_cov.cols() == model.input_dim(),
          ErrorKind::DimensionMismatch, "input law does not match model input dimension");
  check_covariance(input_cov, "input covariance");
  Matrix cov = model.weight * input_cov * model.weight.transpose();
  return GaussianDist(model(input_mean), symmetrized(cov));
}

GaussianDist pushforward_affine(const AffineModel& model, const GaussianDist& input) {
  return pushforward_affine(model, input.mean(), input.cov());
}

double kl_gaussian(const GaussianDist& p, const GaussianDist& q) {
  require(p.dim() == q.dim(), ErrorKind::DimensionMismatch, "KL between Gaussians of different dimension");
  // No jitter retry for the reference: a singular reference means p is not
  // absolutely continuous with respect to q, which is a hard error.
  Eigen::LLT<Matrix> lq(q.cov());
  require(lq.info() == Eigen::Success && lq.matrixLLT().diagonal().minCoeff() > 0.0,
          ErrorKind::SingularReference, "reference covariance is not positive definite");

  Eigen::LLT<Matrix> lp(p.cov());
  if (lp.info() != Eigen::Success || lp.matrixLLT().diagonal().minCoeff() <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }

  const Vector diff = q.mean() - p.mean();
  const double quad = diff.dot(lq.solve(diff));
  return std::max(kl_covariance_term(p.cov(), lq) + 0.5 * quad, 0.0);
}

double w2sq_gaussian(const GaussianDist& p, const GaussianDist& q) {
  require(p.dim() == q.dim(), ErrorKind::DimensionMismatch, "W2 between Gaussians of different dimension");
  const double mean_term = (p.mean() - q.mean()).squaredNorm();
  return mean_term + bures_sq(p.cov(), q.cov());
}

}  // namespace tlrisk
