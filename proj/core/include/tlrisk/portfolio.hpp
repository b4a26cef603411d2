#pragma once

// Long-only Sharpe-ratio portfolios on the unit simplex, the variant
// anchored to a pretrained portfolio, and the Gaussian W2 pre-screening risk
// between two return histories.

#include <optional>

#include "tlrisk/gaussian.hpp"

namespace tlrisk {

struct ReturnsDataset {
  Matrix returns;  // T x d

  /// Requires finite entries, T >= 2 (InsufficientHistory) and d >= 2.
  explicit ReturnsDataset(Matrix returns);

  Eigen::Index periods() const noexcept { return returns.rows(); }
  Eigen::Index assets() const noexcept { return returns.cols(); }
};

class Portfolio {
 public:
  /// Weights must be >= -1e-12 and sum to 1 within 1e-9.
  explicit Portfolio(Vector weights);

  static Portfolio uniform(Eigen::Index d);

  const Vector& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.size(); }

 private:
  Vector weights_;
};

/// Euclidean projection onto {x >= 0, sum x = 1}.
Vector project_simplex(const Vector& v);

struct Moments {
  Vector mu;
  Matrix sigma;
};

/// Sample mean and unbiased covariance; the covariance is symmetrized and
/// negative round-off eigenvalues are clamped to zero.
Moments estimate_moments(const ReturnsDataset& data);

/// mu^T phi / sqrt(phi^T sigma phi). ZeroVariancePortfolio when the
/// variance is <= 1e-14.
double sharpe_ratio(const Portfolio& portfolio, const Vector& mu, const Matrix& sigma);

struct SharpeOptions {
  double initial_step = 1e-2;
  long max_iterations = 100000;
  /// Bound on the stationarity measure, see SharpeResult.
  double tolerance = 1e-8;
};

struct SharpeResult {
  Portfolio portfolio;
  double objective;
  /// || P(phi + grad / (1 + 2 penalty)) - phi || at the returned point,
  /// P the simplex projection. Zero exactly at stationary points.
  double stationarity;
  long iterations;
  bool converged;
};

/// Sharpe ratio minus penalty * ||phi - anchor||^2 (no penalty term without
/// an anchor).
double sharpe_objective(const Vector& phi, const Vector& mu, const Matrix& sigma, const std::optional<Vector>& anchor,
                        double penalty);

/// Projected gradient ascent from the uniform portfolio, every vertex and
/// the anchor; the best end point wins. Throws NonPSDSigma for an invalid
/// covariance and DegenerateVariance when some feasible portfolio has zero
/// variance (the ratio is then undefined there).
SharpeResult sharpe_optimize(const Vector& mu, const Matrix& sigma, const std::optional<Portfolio>& anchor,
                             double penalty, const SharpeOptions& options = {});

/// Squared W2 between N(mu_S, Sigma_S) and N(mu_T, Sigma_T) fitted to the
/// two datasets.
double prescreen_risk_w2(const ReturnsDataset& source, const ReturnsDataset& target);

inline constexpr double kDefaultPortfolioPenalty = 0.2;

struct PortfolioOutcome {
  Portfolio pretrained;   // optimal on source training moments
  Portfolio transferred;  // anchored refit on target training moments
  Portfolio direct;       // optimal on target training moments
  double in_sample_pretrained;
  double in_sample_transferred;
  double in_sample_direct;
  double out_of_sample_pretrained;
  double out_of_sample_transferred;
  double out_of_sample_direct;
  /// Squared W2 between source training and target test moments.
  double prescreen_risk;
};

PortfolioOutcome run_portfolio_transfer(const ReturnsDataset& source_train, const ReturnsDataset& target_train,
                                        const ReturnsDataset& target_test, double penalty = kDefaultPortfolioPenalty,
                                        const SharpeOptions& options = {});

}  // namespace tlrisk
