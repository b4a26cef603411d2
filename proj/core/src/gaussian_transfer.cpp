#include "tlrisk/gaussian_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tlrisk {

std::string_view to_string(RiskVariant v) noexcept { return v == RiskVariant::KL ? "KL" : "Wasserstein"; }

double kl_variance_h(double x) {
  require(x > 0.0, ErrorKind::InvalidArgument, "h(x) needs x > 0");
  const double e = x - 1.0;
  if (std::abs(e) < 1e-4) {
    // (e - log(1 + e)) / 2 = e^2/4 - e^3/6 + e^4/8 - e^5/10 + ...
    return e * e * (0.25 + e * (-1.0 / 6.0 + e * (0.125 + e * (-0.1 + e / 12.0))));
  }
  return 0.5 * (x - std::log(x) - 1.0);
}

namespace {

constexpr double kDegenerateVar = 1e-14;

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

bool blocks_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!close(a(i, j), b(i, j))) return false;
  return true;
}

// x^T S^-1 y for a task's input block.
double quad_form(const GaussianJointTask& task) {
  const SpdFactor sx(task.cov_x(), ErrorKind::SingularInputCovariance, "input covariance");
  const Vector sxy = task.cov_xy().col(0);
  return sxy.dot(sx.solve(sxy));
}

}  // namespace

BasicCasePair::BasicCasePair(GaussianJointTask source, GaussianJointTask target)
    : source_(std::move(source)), target_(std::move(target)) {
  require(source_.dim_y() == 1 && target_.dim_y() == 1, ErrorKind::DimensionMismatch,
          "basic case needs scalar outputs");
  require(source_.dim_x() == target_.dim_x(), ErrorKind::DimensionMismatch,
          "basic case needs matching input dimensions");
}

BasicCaseTerms basic_case_terms(const BasicCasePair& pair) {
  const auto& s = pair.source();
  const auto& t = pair.target();
  const AffineModel fs = fit_optimal_affine(s);
  const AffineModel ft = fit_optimal_affine(t);
  BasicCaseTerms terms;
  terms.source_weight = fs.weight.row(0).transpose();
  terms.target_weight = ft.weight.row(0).transpose();
  const Matrix stx = t.cov_x();
  const Vector sws = stx * terms.source_weight;
  terms.transferred_var = terms.source_weight.dot(sws);
  terms.target_var = terms.target_weight.dot(stx * terms.target_weight);
  terms.cross = terms.target_weight.dot(sws);
  terms.bias_gap = t.mean_y()[0] - s.mean_y()[0] - terms.source_weight.dot(t.mean_x() - s.mean_x());
  return terms;
}

std::pair<GaussianDist, GaussianDist> basic_pushforwards(const BasicCasePair& pair) {
  const GaussianDist input = pair.target().input_law();
  return {pushforward_affine(fit_optimal_affine(pair.target()), input),
          pushforward_affine(fit_optimal_affine(pair.source()), input)};
}

RiskDecomposition basic_output_risk_kl(const BasicCasePair& pair) {
  const BasicCaseTerms t = basic_case_terms(pair);
  require(t.transferred_var > kDegenerateVar, ErrorKind::DegeneratePushforward,
          "transferred prediction has zero variance; P_T is not absolutely continuous w.r.t. P_ST");
  require(t.target_var > kDegenerateVar, ErrorKind::DegeneratePushforward,
          "optimal target prediction has zero variance");
  const double variance = kl_variance_h(t.target_var / t.transferred_var);
  const double bias = t.bias_gap * t.bias_gap / (2.0 * t.transferred_var);
  return {variance + bias, variance, bias};
}

RiskDecomposition basic_output_risk_w(const BasicCasePair& pair) {
  const BasicCaseTerms t = basic_case_terms(pair);
  const double root_gap = std::sqrt(std::max(t.transferred_var, 0.0)) - std::sqrt(std::max(t.target_var, 0.0));
  const double variance = root_gap * root_gap;
  const double bias = t.bias_gap * t.bias_gap;
  return {variance + bias, variance, bias};
}

RiskDecomposition basic_output_risk(const BasicCasePair& pair, RiskVariant variant) {
  return variant == RiskVariant::KL ? basic_output_risk_kl(pair) : basic_output_risk_w(pair);
}

RegretDecomposition regret_closed_form(const BasicCasePair& pair) {
  const BasicCaseTerms t = basic_case_terms(pair);
  const Vector dw = t.target_weight - t.source_weight;
  const double var_hat = std::max(dw.dot(pair.target().cov_x() * dw), 0.0);
  const double bias_hat = t.bias_gap * t.bias_gap;
  return {var_hat + bias_hat, var_hat, bias_hat};
}

RegretRiskIdentity regret_risk_identity(const BasicCasePair& pair) {
  const BasicCaseTerms t = basic_case_terms(pair);
  const double norms = std::sqrt(std::max(t.target_var, 0.0)) * std::sqrt(std::max(t.transferred_var, 0.0));
  return {regret_closed_form(pair).regret, basic_output_risk_w(pair).total, 2.0 * (norms - t.cross)};
}

FeatureAugmentedPair::FeatureAugmentedPair(GaussianJointTask source, GaussianJointTask target)
    : source_(std::move(source)), target_(std::move(target)) {
  const Eigen::Index d = source_.dim_x();
  require(source_.dim_y() == 1 && target_.dim_y() == 1, ErrorKind::DimensionMismatch,
          "feature augmentation needs scalar outputs");
  require(target_.dim_x() > d, ErrorKind::DimensionMismatch, "target input must strictly extend the source input");
  const Matrix tx = target_.cov_x();
  const Vector tmx = target_.mean_x();
  auto check = [](bool ok, const char* what) {
    require(ok, ErrorKind::InconsistentAugmentation, std::string("target ") + what + " differs from the source");
  };
  check(blocks_equal(tmx.head(d), source_.mean_x()), "input mean on the shared coordinates");
  check(blocks_equal(target_.mean_y(), source_.mean_y()), "output mean");
  check(blocks_equal(tx.topLeftCorner(d, d), source_.cov_x()), "input covariance on the shared coordinates");
  check(blocks_equal(target_.cov_xy().topRows(d), source_.cov_xy()), "input-output covariance");
  check(blocks_equal(target_.cov_y(), source_.cov_y()), "output variance");
}

AffineModel FeatureAugmentedPair::projection() const {
  const Eigen::Index d = source_.dim_x();
  AffineModel proj;
  proj.weight = Matrix::Zero(d, target_.dim_x());
  proj.weight.leftCols(d).setIdentity();
  proj.intercept = Vector::Zero(d);
  return proj;
}

double feature_aug_ratio(const FeatureAugmentedPair& pair) {
  const double base = quad_form(pair.source());
  require(base > kDegenerateVar, ErrorKind::DegeneratePushforward, "source predictions have zero variance");
  return quad_form(pair.target()) / base;
}

double feature_aug_uncorrelated_ratio(const FeatureAugmentedPair& pair) {
  const auto& t = pair.target();
  const Eigen::Index d = pair.source().dim_x();
  const Eigen::Index k = pair.augmented_dim();
  const Matrix cross = t.cov_x().topRightCorner(d, k);
  require(cross.cwiseAbs().maxCoeff() == 0.0, ErrorKind::InvalidArgument,
          "augmented features are correlated with the source input");
  const Matrix sax = t.cov_x().bottomRightCorner(k, k);
  const Vector saxy = t.cov_xy().col(0).tail(k);
  const SpdFactor fa(sax, ErrorKind::SingularInputCovariance, "augmented input covariance");
  const double base = quad_form(pair.source());
  require(base > kDegenerateVar, ErrorKind::DegeneratePushforward, "source predictions have zero variance");
  return 1.0 + saxy.dot(fa.solve(saxy)) / base;
}

std::pair<GaussianDist, GaussianDist> feature_aug_pushforwards(const FeatureAugmentedPair& pair) {
  const GaussianDist input = pair.target().input_law();
  const AffineModel intermediate = compose(fit_optimal_affine(pair.source()), pair.projection());
  return {pushforward_affine(fit_optimal_affine(pair.target()), input), pushforward_affine(intermediate, input)};
}

RiskDecomposition feature_aug_risk(const FeatureAugmentedPair& pair, RiskVariant variant) {
  const double base = quad_form(pair.source());
  const double full = quad_form(pair.target());
  require(base > kDegenerateVar, ErrorKind::DegeneratePushforward, "source predictions have zero variance");
  double variance = 0.0;
  if (variant == RiskVariant::KL) {
    require(full > kDegenerateVar, ErrorKind::DegeneratePushforward, "target predictions have zero variance");
    variance = kl_variance_h(full / base);
  } else {
    const double gap = std::sqrt(std::max(full, 0.0)) - std::sqrt(base);
    variance = gap * gap;
  }
  return {variance, variance, 0.0};
}

OutputAugmentedPair::OutputAugmentedPair(GaussianJointTask source, GaussianJointTask target, AffineModel init_model)
    : source_(std::move(source)), target_(std::move(target)), init_(std::move(init_model)) {
  const Eigen::Index d = source_.dim_x();
  const Eigen::Index l = source_.dim_y();
  require(target_.dim_x() == d, ErrorKind::DimensionMismatch, "output augmentation keeps the input space");
  require(target_.dim_y() > l, ErrorKind::DimensionMismatch, "target output must strictly extend the source output");
  const Eigen::Index k = target_.dim_y() - l;
  require(init_.weight.rows() == k && init_.weight.cols() == d && init_.intercept.size() == k,
          ErrorKind::DimensionMismatch,
          "initial model must map R^" + std::to_string(d) + " to R^" + std::to_string(k));
  require(init_.weight.allFinite() && init_.intercept.allFinite(), ErrorKind::InvalidArgument,
          "initial model has non-finite entries");
  auto check = [](bool ok, const char* what) {
    require(ok, ErrorKind::InconsistentAugmentation, std::string("target ") + what + " differs from the source");
  };
  check(blocks_equal(target_.mean_x(), source_.mean_x()), "input mean");
  check(blocks_equal(target_.cov_x(), source_.cov_x()), "input covariance");
  check(blocks_equal(target_.mean_y().head(l), source_.mean_y()), "output mean on the shared outputs");
  check(blocks_equal(target_.cov_xy().leftCols(l), source_.cov_xy()), "input-output covariance on the shared outputs");
  check(blocks_equal(target_.cov_y().topLeftCorner(l, l), source_.cov_y()), "output covariance on the shared outputs");
}

AffineModel neutralizing_init(const GaussianJointTask& source, const GaussianJointTask& target) {
  const Eigen::Index l = source.dim_y();
  const Eigen::Index k = target.dim_y() - l;
  require(k >= 1 && target.dim_x() == source.dim_x(), ErrorKind::DimensionMismatch,
          "target must augment the source output");
  const SpdFactor sx(source.cov_x(), ErrorKind::SingularInputCovariance, "input covariance");
  const Matrix saxy = target.cov_xy().rightCols(k);
  AffineModel f0;
  f0.weight = sx.solve(saxy).transpose();
  f0.intercept = target.mean_y().tail(k) - f0.weight * source.mean_x();
  return f0;
}

OutputAugRisk output_aug_risk(const OutputAugmentedPair& pair, RiskVariant variant) {
  const auto& s = pair.source();
  const auto& t = pair.target();
  const auto& f0 = pair.init_model();
  const Eigen::Index l = s.dim_y();
  const Eigen::Index k = pair.augmented_dim();
  const Eigen::Index m = l + k;

  const SpdFactor sx(s.cov_x(), ErrorKind::SingularInputCovariance, "input covariance");
  const Matrix sigma_x = s.cov_x();
  const Vector mu_x = s.mean_x();
  const Matrix ws = sx.solve(s.cov_xy());            // d x l
  const Matrix saxy = t.cov_xy().rightCols(k);       // d x k
  const Matrix w0 = f0.weight.transpose();           // d x k
  const Vector bs = s.mean_y() - ws.transpose() * mu_x;

  OutputAugRisk out;
  out.mu1.resize(m);
  out.mu1.head(l) = ws.transpose() * mu_x + bs;
  out.mu1.tail(k) = t.mean_y().tail(k);
  out.sigma1.resize(m, m);
  out.sigma1.topLeftCorner(l, l) = ws.transpose() * sigma_x * ws;
  out.sigma1.topRightCorner(l, k) = ws.transpose() * saxy;
  out.sigma1.bottomLeftCorner(k, l) = out.sigma1.topRightCorner(l, k).transpose();
  out.sigma1.bottomRightCorner(k, k) = saxy.transpose() * sx.solve(saxy);
  out.sigma1 = symmetrized(out.sigma1);

  out.mu2.resize(m);
  out.mu2.head(l) = ws.transpose() * mu_x + bs;
  out.mu2.tail(k) = w0.transpose() * mu_x + f0.intercept;
  out.sigma2.resize(m, m);
  out.sigma2.topLeftCorner(l, l) = ws.transpose() * sigma_x * ws;
  out.sigma2.topRightCorner(l, k) = ws.transpose() * sigma_x * w0;
  out.sigma2.bottomLeftCorner(k, l) = out.sigma2.topRightCorner(l, k).transpose();
  out.sigma2.bottomRightCorner(k, k) = w0.transpose() * sigma_x * w0;
  out.sigma2 = symmetrized(out.sigma2);

  const Vector diff = out.mu1 - out.mu2;
  if (variant == RiskVariant::KL) {
    Eigen::LLT<Matrix> l2(out.sigma2);
    require(l2.info() == Eigen::Success && l2.matrixLLT().diagonal().minCoeff() > 1e-12,
            ErrorKind::SingularIntermediateCovariance, "intermediate prediction covariance is singular");
    Eigen::LLT<Matrix> l1(out.sigma1);
    require(l1.info() == Eigen::Success && l1.matrixLLT().diagonal().minCoeff() > 1e-12,
            ErrorKind::DegeneratePushforward, "optimal target prediction covariance is singular");
    const double variance = std::max(kl_covariance_term(out.sigma1, l2), 0.0);
    const double bias = 0.5 * diff.dot(l2.solve(diff));
    out.risk = {variance + bias, variance, bias};
  } else {
    const double variance = bures_sq(out.sigma1, out.sigma2);
    const double bias = diff.squaredNorm();
    out.risk = {variance + bias, variance, bias};
  }
  return out;
}

RiskDecomposition output_risk_for_model(const AffineModel& intermediate, const GaussianJointTask& target,
                                        RiskVariant variant) {
  require(intermediate.input_dim() == target.dim_x() && intermediate.output_dim() == target.dim_y(),
          ErrorKind::DimensionMismatch, "intermediate model shape does not match target task");
  const GaussianDist input = target.input_law();
  const GaussianDist p_t = pushforward_affine(fit_optimal_affine(target), input);
  const GaussianDist p_st = pushforward_affine(intermediate, input);
  const Vector diff = p_t.mean() - p_st.mean();
  if (variant == RiskVariant::KL) {
    const double total = kl_gaussian(p_t, p_st);
    const SpdFactor ref(p_st.cov(), ErrorKind::SingularReference, "intermediate prediction covariance");
    const double bias = 0.5 * diff.dot(ref.solve(diff));
    return {total, std::max(total - bias, 0.0), bias};
  }
  const double total = w2sq_gaussian(p_st, p_t);
  const double bias = diff.squaredNorm();
  return {total, std::max(total - bias, 0.0), bias};
}

}  // namespace tlrisk
