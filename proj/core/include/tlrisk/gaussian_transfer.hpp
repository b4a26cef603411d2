#pragma once

// Closed-form output transport risks, their variance/bias decompositions and
// the regret of plugging in the pretrained model, for linear regression with
// jointly Gaussian data. Three settings are covered:
//
//  * basic: same input and output spaces, identity transports;
//  * feature augmentation: the target input appends k coordinates and the
//    input transport projects them away;
//  * output augmentation: the target output appends k coordinates predicted
//    by a fixed initial affine model f0.
//
// Throughout, P_T is the law of the optimal target model's prediction and
// P_ST the law of the intermediate (transferred) model's prediction, both
// under the target input law. The KL risk is KL(P_T || P_ST) and the
// Wasserstein risk is W2(P_ST, P_T)^2.

#include <string_view>

#include "tlrisk/gaussian.hpp"

namespace tlrisk {

enum class RiskVariant { KL, Wasserstein };

std::string_view to_string(RiskVariant v) noexcept;

struct RiskDecomposition {
  double total;
  double variance_term;
  double bias_term;
};

/// h(x) = (x - log x - 1) / 2, with a series branch near x = 1.
double kl_variance_h(double x);

class BasicCasePair {
 public:
  BasicCasePair(GaussianJointTask source, GaussianJointTask target);

  const GaussianJointTask& source() const noexcept { return source_; }
  const GaussianJointTask& target() const noexcept { return target_; }

 private:
  GaussianJointTask source_;
  GaussianJointTask target_;
};

/// Scalar ingredients shared by the basic-case formulas.
struct BasicCaseTerms {
  Vector source_weight;      // w_S
  Vector target_weight;      // w_T
  double transferred_var;    // w_S^T S_TX w_S, variance of P_ST
  double target_var;         // w_T^T S_TX w_T, variance of P_T
  double cross;              // w_T^T S_TX w_S
  double bias_gap;           // mu_TY - mu_SY - w_S^T (mu_TX - mu_SX)
};

BasicCaseTerms basic_case_terms(const BasicCasePair& pair);

/// (P_T, P_ST) built explicitly through fit_optimal_affine and pushforward_affine.
std::pair<GaussianDist, GaussianDist> basic_pushforwards(const BasicCasePair& pair);

/// Throws DegeneratePushforward when Var(P_ST) <= 1e-14 (P_T is then not
/// absolutely continuous w.r.t. P_ST) or when Var(P_T) <= 1e-14.
RiskDecomposition basic_output_risk_kl(const BasicCasePair& pair);
RiskDecomposition basic_output_risk_w(const BasicCasePair& pair);
RiskDecomposition basic_output_risk(const BasicCasePair& pair, RiskVariant variant);

struct RegretDecomposition {
  double regret;
  double var_hat;   // ||S_TX^1/2 (w_T - w_S)||^2
  double bias_hat;  // bias_gap^2
};

/// L_T(f_S*) - L_T(f_T*).
RegretDecomposition regret_closed_form(const BasicCasePair& pair);

struct RegretRiskIdentity {
  double regret;
  double risk_w;
  /// 2 (||S^1/2 w_T|| ||S^1/2 w_S|| - <S^1/2 w_T, S^1/2 w_S>) >= 0.
  double residual;
};

RegretRiskIdentity regret_risk_identity(const BasicCasePair& pair);

/// Target input is [source input; k augmented coordinates], output unchanged.
/// Block consistency with the source is checked on construction.
class FeatureAugmentedPair {
 public:
  FeatureAugmentedPair(GaussianJointTask source, GaussianJointTask target);

  const GaussianJointTask& source() const noexcept { return source_; }
  const GaussianJointTask& target() const noexcept { return target_; }
  Eigen::Index augmented_dim() const noexcept { return target_.dim_x() - source_.dim_x(); }

  /// The projection dropping the augmented coordinates, as a (d x (d+k)) map.
  AffineModel projection() const;

 private:
  GaussianJointTask source_;
  GaussianJointTask target_;
};

/// ratio = S_TYX S_TX^-1 S_TXY / S_SYX S_SX^-1 S_SXY.
double feature_aug_ratio(const FeatureAugmentedPair& pair);

/// 1 + S_AYX S_AX^-1 S_AXY / S_SYX S_SX^-1 S_SXY; only valid when the
/// augmented block is uncorrelated with the source input (InvalidArgument
/// otherwise).
double feature_aug_uncorrelated_ratio(const FeatureAugmentedPair& pair);

std::pair<GaussianDist, GaussianDist> feature_aug_pushforwards(const FeatureAugmentedPair& pair);

/// bias_term is identically zero.
RiskDecomposition feature_aug_risk(const FeatureAugmentedPair& pair, RiskVariant variant);

/// Target output is [source output; k augmented outputs], input unchanged;
/// init_model is f0 : R^d -> R^k filling the augmented outputs.
class OutputAugmentedPair {
 public:
  OutputAugmentedPair(GaussianJointTask source, GaussianJointTask target, AffineModel init_model);

  const GaussianJointTask& source() const noexcept { return source_; }
  const GaussianJointTask& target() const noexcept { return target_; }
  const AffineModel& init_model() const noexcept { return init_; }
  Eigen::Index augmented_dim() const noexcept { return target_.dim_y() - source_.dim_y(); }

 private:
  GaussianJointTask source_;
  GaussianJointTask target_;
  AffineModel init_;
};

/// f0 that regresses the augmented outputs optimally on X, which makes
/// P_ST = P_T.
AffineModel neutralizing_init(const GaussianJointTask& source, const GaussianJointTask& target);

struct OutputAugRisk {
  RiskDecomposition risk;
  Vector mu1;     // mean of P_T
  Matrix sigma1;  // covariance of P_T
  Vector mu2;     // mean of P_ST
  Matrix sigma2;  // covariance of P_ST
};

/// KL variant throws SingularIntermediateCovariance when sigma2 is not
/// positive definite and DegeneratePushforward when sigma1 is singular.
OutputAugRisk output_aug_risk(const OutputAugmentedPair& pair, RiskVariant variant);

/// Risk of an arbitrary affine intermediate model against the target's
/// optimal model, via explicit pushforwards and the gaussian_core divergences.
RiskDecomposition output_risk_for_model(const AffineModel& intermediate, const GaussianJointTask& target,
                                        RiskVariant variant);

}  // namespace tlrisk
