#pragma once

// Ridge regression with optional anchoring to a pretrained parameter, and
// the signature-feature return prediction pipeline built on it: pretrain on
// a pooled multi-asset source, refit on the target with a penalty towards
// the pretrained parameter, compare with direct learning on the target.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlrisk/linalg.hpp"

namespace tlrisk {

struct RegressionDataset {
  Matrix features;  // T x d
  Vector targets;   // T

  RegressionDataset(Matrix features, Vector targets);

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dim() const noexcept { return features.cols(); }
};

/// Stacks datasets with identical feature dimension.
RegressionDataset pool(std::span<const RegressionDataset> parts);

/// Column-wise standardization learned from training data. Columns whose
/// training standard deviation is (numerically) zero are dropped.
class Standardizer {
 public:
  static Standardizer fit(const Matrix& train);
  /// Fit using a fixed keep mask; kept columns must have positive spread.
  static Standardizer fit(const Matrix& train, std::vector<bool> keep);

  /// Columns that are constant in `train`.
  static std::vector<bool> nonconstant_columns(const Matrix& train);

  /// (T x d) -> (T x kept) standardized.
  Matrix transform(const Matrix& x) const;
  /// (T x kept) -> (T x d); dropped columns are restored to their mean.
  Matrix inverse_transform(const Matrix& z) const;

  const Vector& mean() const noexcept { return mean_; }
  const Vector& scale() const noexcept { return scale_; }
  const std::vector<bool>& keep() const noexcept { return keep_; }
  Eigen::Index kept() const noexcept { return kept_; }

 private:
  Vector mean_;
  Vector scale_;
  std::vector<bool> keep_;
  Eigen::Index kept_ = 0;
};

struct RidgeProblem {
  double lambda;
  std::optional<Vector> anchor;
  /// Columns excluded from the penalty (e.g. an intercept column).
  std::vector<Eigen::Index> unpenalized;
};

/// (1/T) sum (x_t . theta - y_t)^2 + lambda ||P (theta - anchor)||^2, P the
/// penalty mask.
double ridge_objective(const RegressionDataset& data, const Vector& theta, const RidgeProblem& problem);

/// Unique minimizer of ridge_objective, from the normal equations
/// (X^T X / T + lambda P) theta = X^T y / T + lambda P anchor.
Vector ridge_fit(const RegressionDataset& data, const RidgeProblem& problem);
Vector ridge_fit(const RegressionDataset& data, double lambda, const std::optional<Vector>& anchor = std::nullopt);

/// Plain ridge on the pooled source data.
Vector pretrain_source(const RegressionDataset& pooled, double lambda_source,
                       std::vector<Eigen::Index> unpenalized = {});

struct EvalMetrics {
  double mse;
  double r2;
  double corr;
  /// False when predictions or targets are constant; corr is then 0.
  bool corr_defined;
};

EvalMetrics evaluate(const Vector& theta, const RegressionDataset& test);

Vector predict(const Vector& theta, const Matrix& features);

/// W_p(predictions, targets)^p between the empirical laws on the test set.
double transfer_output_risk(const Vector& theta, const RegressionDataset& test, double p = 2.0);

// ---------------------------------------------------------------------------
// Return prediction pipeline.

struct AssetSeries {
  std::string name;
  Vector close;   // positive prices
  Vector volume;  // positive volumes
};

/// Signature features of z = (tau, log close, log volume) over windows of
/// `lag` rows ending at t, and target y_t = log s_{t+1} - log s_t. Row i
/// corresponds to t = lag - 1 + i.
RegressionDataset asset_dataset(const AssetSeries& asset, int lag, int order);

struct PredictionConfig {
  int lag = 5;
  int order = 2;
  double lambda_source = 1.0;
  double lambda_target = 5.0;
  /// Penalty of the direct (no transfer) fit on the target.
  double lambda_direct = 1.0;
};

struct PredictionCell {
  int lag;
  int order;
  EvalMetrics direct;
  EvalMetrics transfer;
  /// W2^2 between pretrained-model predictions and realized targets on the
  /// target test set.
  double transfer_risk;
  Vector theta_source;
  Vector theta_direct;
  Vector theta_transfer;
  Eigen::Index train_rows;
  Eigen::Index test_rows;
  Eigen::Index source_rows;
};

/// An asset together with its split: `split` is the index of the first
/// price of the test period. Rows whose target uses a price before `split`
/// train, the others test.
struct SplitSeries {
  AssetSeries asset;
  Eigen::Index split;
};

/// Features and targets are standardized per asset with that asset's
/// training statistics, using the columns that vary in every training set;
/// an unpenalized intercept column is appended. The source model is fitted
/// on the pooled training rows of all sources.
PredictionCell run_prediction(std::span<const SplitSeries> sources, const SplitSeries& target,
                              const PredictionConfig& config);

}  // namespace tlrisk
