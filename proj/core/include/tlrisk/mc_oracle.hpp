#pragma once

// Independent Monte-Carlo and quadrature oracles for the closed forms, plus
// the seeded random stream every stochastic routine in the library uses.
//
// The generator is SplitMix64 evaluated in counter mode: draw k of stream
// `seed` is mix64(seed + (k + 1) * 0x9E3779B97F4A7C15). Normals come from
// inverse-CDF sampling with Acklam's rational approximation (absolute error
// below 1.2e-9), which needs only +, *, /, sqrt and log.

#include <cstdint>
#include <string_view>

#include "tlrisk/gaussian.hpp"

namespace tlrisk {

class SeededStream {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-counter/acklam-invcdf";

  explicit SeededStream(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  Vector normal_vector(Eigen::Index n);

  /// Child stream for shard / task `index`; independent of how many draws
  /// the parent has made.
  SeededStream split(std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Standard normal quantile function.
double normal_quantile(double u);
double normal_cdf(double x);
double normal_log_pdf(double x, double mean, double variance);

/// n samples of N(mean, cov), one per row, drawn as mean + L z. L is the
/// Cholesky factor (with the SpdFactor jitter retry); a covariance that is
/// only semidefinite falls back to the symmetric square root, so a zero
/// covariance gives rows equal to the mean.
Matrix sample_gaussian(const GaussianDist& dist, Eigen::Index n, SeededStream& stream);

/// Rows are [x, y] draws of the task's joint law.
Matrix sample_joint(const GaussianJointTask& task, Eigen::Index n, SeededStream& stream);

struct McEstimate {
  double estimate;
  double std_error;
};

/// Sample mean of ||Y - model(X)||^2 under the task law.
McEstimate mc_loss(const AffineModel& model, const GaussianJointTask& task, Eigen::Index n, SeededStream& stream);

/// Paired estimate of L(a) - L(b) on common samples.
McEstimate mc_loss_difference(const AffineModel& a, const AffineModel& b, const GaussianJointTask& task,
                              Eigen::Index n, SeededStream& stream);

/// Squared W2 between two 1D Gaussians estimated as the W2^2 between
/// empirical measures of n draws each. Both samples reuse the same uniforms
/// (the 1D quantile coupling), so the estimate is a mean of i.i.d. terms
/// and the reported standard error is exact.
McEstimate mc_w2_1d(const GaussianDist& p, const GaussianDist& q, Eigen::Index n, SeededStream& stream);

/// KL(p || q) for 1D Gaussians by adaptive Simpson quadrature of
/// p log(p / q) over mean(p) +/- 12 sd(p).
double kl_quadrature_1d(const GaussianDist& p, const GaussianDist& q);

/// Random well-conditioned joint task: covariance A A^T / (d + l) + 0.5 I
/// with A standard normal, mean entries uniform in [-1, 1].
GaussianJointTask random_joint_task(SeededStream& stream, Eigen::Index dim_x, Eigen::Index dim_y);

/// Random symmetric positive definite n x n matrix with eigenvalues in
/// [lo, hi].
Matrix random_spd(SeededStream& stream, Eigen::Index n, double lo, double hi);

}  // namespace tlrisk
