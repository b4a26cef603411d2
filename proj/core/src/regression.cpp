#include "tlrisk/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlrisk/divergence.hpp"
#include "tlrisk/signature.hpp"

namespace tlrisk {

RegressionDataset::RegressionDataset(Matrix features_, Vector targets_)
    : features(std::move(features_)), targets(std::move(targets_)) {
  require(features.rows() == targets.size(), ErrorKind::DimensionMismatch,
          "features have " + std::to_string(features.rows()) + " rows but targets have " +
              std::to_string(targets.size()));
  require(features.rows() >= 1, ErrorKind::InvalidArgument, "a regression dataset needs at least one row");
  require(features.allFinite() && targets.allFinite(), ErrorKind::InvalidArgument,
          "regression dataset has non-finite entries");
}

RegressionDataset pool(std::span<const RegressionDataset> parts) {
  require(!parts.empty(), ErrorKind::InvalidArgument, "nothing to pool");
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    require(p.dim() == parts.front().dim(), ErrorKind::DimensionMismatch, "pooled datasets differ in dimension");
    rows += p.size();
  }
  Matrix x(rows, parts.front().dim());
  Vector y(rows);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    x.middleRows(at, p.size()) = p.features;
    y.segment(at, p.size()) = p.targets;
    at += p.size();
  }
  return {std::move(x), std::move(y)};
}

namespace {

// Spread below this (relative to the column magnitude) counts as constant.
constexpr double kConstantRelTol = 1e-12;

Vector column_sd(const Matrix& x, const Vector& mean) {
  Vector sd(x.cols());
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - mean[j]).square().sum();
    sd[j] = x.rows() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return sd;
}

bool is_constant(double sd, double mean, const Eigen::Ref<const Vector>& col) {
  const double mag = std::max(std::abs(mean), col.cwiseAbs().maxCoeff());
  return !(sd > kConstantRelTol * std::max(mag, 1e-300));
}

}  // namespace

std::vector<bool> Standardizer::nonconstant_columns(const Matrix& train) {
  require(train.rows() >= 1, ErrorKind::InvalidArgument, "standardizer needs training rows");
  const Vector mean = train.colwise().mean().transpose();
  const Vector sd = column_sd(train, mean);
  std::vector<bool> keep(static_cast<std::size_t>(train.cols()));
  for (Eigen::Index j = 0; j < train.cols(); ++j)
    keep[static_cast<std::size_t>(j)] = !is_constant(sd[j], mean[j], train.col(j));
  return keep;
}

Standardizer Standardizer::fit(const Matrix& train) { return fit(train, nonconstant_columns(train)); }

Standardizer Standardizer::fit(const Matrix& train, std::vector<bool> keep) {
  require(train.rows() >= 2, ErrorKind::InsufficientHistory, "standardizer needs at least two training rows");
  require(static_cast<Eigen::Index>(keep.size()) == train.cols(), ErrorKind::DimensionMismatch,
          "keep mask length differs from the column count");
  Standardizer s;
  s.mean_ = train.colwise().mean().transpose();
  s.scale_ = column_sd(train, s.mean_);
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    if (!keep[static_cast<std::size_t>(j)]) continue;
    require(!is_constant(s.scale_[j], s.mean_[j], train.col(j)), ErrorKind::DegenerateVariance,
            "column " + std::to_string(j) + " is constant in the training data");
    ++s.kept_;
  }
  s.keep_ = std::move(keep);
  return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
  require(x.cols() == mean_.size(), ErrorKind::DimensionMismatch, "standardizer column count differs");
  Matrix z(x.rows(), kept_);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (!keep_[static_cast<std::size_t>(j)]) continue;
    z.col(k++) = (x.col(j).array() - mean_[j]) / scale_[j];
  }
  return z;
}

Matrix Standardizer::inverse_transform(const Matrix& z) const {
  require(z.cols() == kept_, ErrorKind::DimensionMismatch, "standardized column count differs");
  Matrix x(z.rows(), mean_.size());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < mean_.size(); ++j) {
    if (keep_[static_cast<std::size_t>(j)])
      x.col(j) = (z.col(k++).array() * scale_[j]) + mean_[j];
    else
      x.col(j).setConstant(mean_[j]);
  }
  return x;
}

namespace {

Vector penalty_mask(Eigen::Index d, const std::vector<Eigen::Index>& unpenalized) {
  Vector mask = Vector::Ones(d);
  for (Eigen::Index j : unpenalized) {
    require(j >= 0 && j < d, ErrorKind::DimensionMismatch, "unpenalized column index out of range");
    mask[j] = 0.0;
  }
  return mask;
}

void check_problem(const RegressionDataset& data, const RidgeProblem& problem) {
  require(problem.lambda > 0.0 && std::isfinite(problem.lambda), ErrorKind::NonpositiveLambda,
          "ridge penalty must be positive and finite");
  if (problem.anchor)
    require(problem.anchor->size() == data.dim(), ErrorKind::DimensionMismatch,
            "anchor length " + std::to_string(problem.anchor->size()) + " differs from feature dimension " +
                std::to_string(data.dim()));
}

}  // namespace

double ridge_objective(const RegressionDataset& data, const Vector& theta, const RidgeProblem& problem) {
  check_problem(data, problem);
  require(theta.size() == data.dim(), ErrorKind::DimensionMismatch, "parameter length differs from dimension");
  const double fit = (data.features * theta - data.targets).squaredNorm() / static_cast<double>(data.size());
  Vector diff = problem.anchor ? Vector(theta - *problem.anchor) : theta;
  diff.array() *= penalty_mask(data.dim(), problem.unpenalized).array();
  return fit + problem.lambda * diff.squaredNorm();
}

Vector ridge_fit(const RegressionDataset& data, const RidgeProblem& problem) {
  check_problem(data, problem);
  const double t = static_cast<double>(data.size());
  const Vector mask = penalty_mask(data.dim(), problem.unpenalized);
  Matrix a = data.features.transpose() * data.features / t;
  a.diagonal() += problem.lambda * mask;
  Vector b = data.features.transpose() * data.targets / t;
  if (problem.anchor) b += problem.lambda * mask.cwiseProduct(*problem.anchor);

  Eigen::LLT<Matrix> llt(a);
  require(llt.info() == Eigen::Success, ErrorKind::DegenerateVariance,
          "normal equations are singular (collinear unpenalized columns)");
  Vector theta = llt.solve(b);
  // One step of iterative refinement keeps the residual at round-off level
  // for badly scaled features.
  const Vector r = b - a * theta;
  theta += llt.solve(r);
  return theta;
}

Vector ridge_fit(const RegressionDataset& data, double lambda, const std::optional<Vector>& anchor) {
  return ridge_fit(data, RidgeProblem{lambda, anchor, {}});
}

Vector pretrain_source(const RegressionDataset& pooled, double lambda_source, std::vector<Eigen::Index> unpenalized) {
  return ridge_fit(pooled, RidgeProblem{lambda_source, std::nullopt, std::move(unpenalized)});
}

Vector predict(const Vector& theta, const Matrix& features) {
  require(theta.size() == features.cols(), ErrorKind::DimensionMismatch, "parameter length differs from dimension");
  return features * theta;
}

EvalMetrics evaluate(const Vector& theta, const RegressionDataset& test) {
  require(test.size() >= 1, ErrorKind::EmptyTestSet, "empty test set");
  const Vector pred = predict(theta, test.features);
  const double n = static_cast<double>(test.size());
  const double mean_y = test.targets.mean();
  const double mean_p = pred.mean();
  const Vector dy = test.targets.array() - mean_y;
  const Vector dp = pred.array() - mean_p;
  const double ss_res = (pred - test.targets).squaredNorm();
  const double ss_tot = dy.squaredNorm();
  const double ss_pred = dp.squaredNorm();

  auto flat = [n](double ss, const Vector& v) {
    const double mag = v.cwiseAbs().maxCoeff();
    return !(ss > n * std::pow(kConstantRelTol * std::max(mag, 1e-300), 2));
  };
  const bool y_const = flat(ss_tot, test.targets);
  const bool p_const = flat(ss_pred, pred);

  EvalMetrics m{};
  m.mse = ss_res / n;
  m.r2 = y_const ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  m.corr_defined = !y_const && !p_const;
  m.corr = m.corr_defined ? dy.dot(dp) / std::sqrt(ss_tot * ss_pred) : 0.0;
  return m;
}

double transfer_output_risk(const Vector& theta, const RegressionDataset& test, double p) {
  const Vector pred = predict(theta, test.features);
  EmpiricalSample1D a(std::vector<double>(pred.data(), pred.data() + pred.size()));
  EmpiricalSample1D b(std::vector<double>(test.targets.data(), test.targets.data() + test.targets.size()));
  return wp_empirical_1d(a, b, p);
}

RegressionDataset asset_dataset(const AssetSeries& asset, int lag, int order) {
  const Eigen::Index t = asset.close.size();
  require(asset.volume.size() == t, ErrorKind::DimensionMismatch, asset.name + ": close and volume lengths differ");
  require(lag >= 2, ErrorKind::InvalidArgument, "lag must be at least 2");
  require(t >= lag + 1, ErrorKind::InsufficientHistory,
          asset.name + ": " + std::to_string(t) + " rows cannot fill a window of " + std::to_string(lag) +
              " plus one target");
  require((asset.close.array() > 0.0).all() && (asset.volume.array() > 0.0).all(), ErrorKind::InvalidArgument,
          asset.name + ": close and volume must be positive");
  Matrix series(t, 2);
  series.col(0) = asset.close.array().log();
  series.col(1) = asset.volume.array().log();
  const Matrix sig = windowed_signature_features(series, lag, order);
  const Eigen::Index rows = t - lag;
  Vector y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Index end = lag - 1 + i;
    y[i] = series(end + 1, 0) - series(end, 0);
  }
  return {sig.topRows(rows), std::move(y)};
}

namespace {

struct PreparedAsset {
  Matrix train_x;
  Vector train_y;
  Matrix test_x;
  Vector test_y;
};

PreparedAsset split_asset(const AssetSeries& asset, Eigen::Index split, int lag, int order, bool need_test) {
  const RegressionDataset all = asset_dataset(asset, lag, order);
  // Row i ends at t = lag - 1 + i and its target uses price t + 1.
  const Eigen::Index first_test = std::clamp<Eigen::Index>(split - lag, 0, all.size());
  require(first_test >= 2, ErrorKind::InsufficientHistory,
          asset.name + ": fewer than two training rows before the split");
  if (need_test) require(first_test < all.size(), ErrorKind::EmptyTestSet, asset.name + ": no rows after the split");
  PreparedAsset p;
  p.train_x = all.features.topRows(first_test);
  p.train_y = all.targets.head(first_test);
  p.test_x = all.features.bottomRows(all.size() - first_test);
  p.test_y = all.targets.tail(all.size() - first_test);
  return p;
}

std::vector<bool> mask_and(std::vector<bool> a, const std::vector<bool>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] && b[i];
  return a;
}

struct Standardized {
  RegressionDataset train;
  std::optional<RegressionDataset> test;
};

Matrix with_intercept(const Matrix& z) {
  Matrix out(z.rows(), z.cols() + 1);
  out.leftCols(z.cols()) = z;
  out.col(z.cols()).setOnes();
  return out;
}

Standardized standardize(const PreparedAsset& p, const std::vector<bool>& keep, const std::string& name) {
  const Standardizer sx = Standardizer::fit(p.train_x, keep);
  const double my = p.train_y.mean();
  const double sy = std::sqrt((p.train_y.array() - my).square().sum() / static_cast<double>(p.train_y.size() - 1));
  require(sy > 0.0, ErrorKind::DegenerateVariance, name + ": training returns are constant");
  Standardized s{RegressionDataset(with_intercept(sx.transform(p.train_x)), (p.train_y.array() - my) / sy),
                 std::nullopt};
  if (p.test_x.rows() > 0)
    s.test.emplace(with_intercept(sx.transform(p.test_x)), (p.test_y.array() - my) / sy);
  return s;
}

}  // namespace

PredictionCell run_prediction(std::span<const SplitSeries> sources, const SplitSeries& target,
                              const PredictionConfig& config) {
  require(!sources.empty(), ErrorKind::InvalidArgument, "at least one source asset is required");
  std::vector<PreparedAsset> src;
  src.reserve(sources.size());
  for (const auto& s : sources) src.push_back(split_asset(s.asset, s.split, config.lag, config.order, false));
  const PreparedAsset tgt = split_asset(target.asset, target.split, config.lag, config.order, true);

  std::vector<bool> keep = Standardizer::nonconstant_columns(tgt.train_x);
  for (const auto& s : src) keep = mask_and(std::move(keep), Standardizer::nonconstant_columns(s.train_x));
  require(std::any_of(keep.begin(), keep.end(), [](bool k) { return k; }), ErrorKind::DegenerateVariance,
          "every signature feature is constant in some training set");

  std::vector<RegressionDataset> src_train;
  src_train.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) src_train.push_back(standardize(src[i], keep, sources[i].asset.name).train);
  const RegressionDataset pooled = pool(src_train);
  const Standardized t = standardize(tgt, keep, target.asset.name);

  const std::vector<Eigen::Index> intercept{pooled.dim() - 1};
  PredictionCell cell{};
  cell.lag = config.lag;
  cell.order = config.order;
  cell.theta_source = pretrain_source(pooled, config.lambda_source, intercept);
  cell.theta_direct = ridge_fit(t.train, RidgeProblem{config.lambda_direct, std::nullopt, intercept});
  cell.theta_transfer = ridge_fit(t.train, RidgeProblem{config.lambda_target, cell.theta_source, intercept});
  cell.direct = evaluate(cell.theta_direct, *t.test);
  cell.transfer = evaluate(cell.theta_transfer, *t.test);
  cell.transfer_risk = transfer_output_risk(cell.theta_source, *t.test, 2.0);
  cell.train_rows = t.train.size();
  cell.test_rows = t.test->size();
  cell.source_rows = pooled.size();
  return cell;
}

}  // namespace tlrisk
