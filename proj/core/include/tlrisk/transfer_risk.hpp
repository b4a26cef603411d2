#pragma once

// Combining input and output transport risks into a transfer risk, picking
// the best intermediate model, task metrics and continuity probes.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tlrisk/gaussian_transfer.hpp"
#include "tlrisk/mc_oracle.hpp"

namespace tlrisk {

struct RiskPair {
  double input_risk;
  double output_risk;

  /// Throws NegativeRisk unless both components are finite and >= 0.
  static RiskPair checked(double input_risk, double output_risk);
};

/// c_in E^I + c_in2 (E^I)^2 + c_out E^O + c_out2 (E^O)^2 with nonnegative
/// coefficients.
struct PolyCombiner {
  double coef_input = 0.0;
  double coef_output_sq = 0.0;
  double coef_output = 0.0;
  double coef_input_sq = 0.0;

  /// 0.31 E^I + 0.92 (E^O)^2, fitted on Office-31.
  static PolyCombiner office31() { return {0.31, 0.92, 0.0, 0.0}; }

  void validate() const;
};

inline constexpr double kDefaultLambda = 1.0;

/// E^O + lambda E^I.
double linear_risk(const RiskPair& pair, double lambda = kDefaultLambda);

double poly_risk(const RiskPair& pair, const PolyCombiner& combiner);

struct LinearCombiner {
  double lambda = kDefaultLambda;
};

using Combiner = std::variant<PolyCombiner, LinearCombiner>;

double combine(const RiskPair& pair, const Combiner& combiner);

struct CandidateRisk {
  std::string model_id;
  RiskPair risks;
};

struct MinRisk {
  double value;
  std::string model_id;
  std::size_t index;
};

/// Minimum combined risk over the intermediate set; ties go to the first
/// candidate in input order.
MinRisk min_risk_over_set(const std::vector<CandidateRisk>& candidates, const Combiner& combiner);

struct RiskReport {
  RiskPair risk_pair;
  double combined;
  RiskVariant variant;
  std::optional<RiskDecomposition> decomposition;
  std::optional<double> regret;
  std::optional<double> residual;
};

/// min(M, sup_x ||f1(x) - f2(x)||): M unless the weights agree to 1e-12,
/// in which case the gap is the constant intercept difference.
double task_metric_dM(const AffineModel& f1, const AffineModel& f2, double saturation);

/// D(mu1, mu2) + d_M(f1, f2).
double task_metric_dS(double distribution_distance, double model_distance);

/// Max over `trials` random source input-mean shifts u with ||u|| = delta of
/// |C_W(shifted) - C_W(base)| / ||u||, where C_W is the basic-case
/// Wasserstein risk and the input-law distance of a pure mean shift is
/// W2 = ||u||. Returns 0 for delta = 0.
double continuity_probe_input(const BasicCasePair& base, double delta, int trials, SeededStream& stream);

/// Max over `trials` perturbations of the pretrained weight (entries uniform
/// in [-delta, delta], intercept kept) of |C_W(perturbed) - C_W(base)|.
double continuity_probe_model(const BasicCasePair& base, double delta, int trials, SeededStream& stream);

/// Same as continuity_probe_model but signed: min over trials of
/// C_W(perturbed) - C_W(base).
double continuity_probe_model_min_change(const BasicCasePair& base, double delta, int trials, SeededStream& stream);

}  // namespace tlrisk
