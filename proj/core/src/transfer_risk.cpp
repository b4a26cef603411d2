#include "tlrisk/transfer_risk.hpp"

#include <algorithm>
#include <cmath>

namespace tlrisk {

RiskPair RiskPair::checked(double input_risk, double output_risk) {
  require(std::isfinite(input_risk) && input_risk >= 0.0, ErrorKind::NegativeRisk,
          "input risk must be finite and nonnegative");
  require(std::isfinite(output_risk) && output_risk >= 0.0, ErrorKind::NegativeRisk,
          "output risk must be finite and nonnegative");
  return {input_risk, output_risk};
}

void PolyCombiner::validate() const {
  for (double c : {coef_input, coef_output_sq, coef_output, coef_input_sq}) {
    require(std::isfinite(c) && c >= 0.0, ErrorKind::InvalidArgument,
            "combiner coefficients must be nonnegative so the risk is monotone");
  }
}

double linear_risk(const RiskPair& pair, double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::NonpositiveLambda, "lambda must be positive");
  return pair.output_risk + lambda * pair.input_risk;
}

double poly_risk(const RiskPair& pair, const PolyCombiner& c) {
  c.validate();
  const double ei = pair.input_risk, eo = pair.output_risk;
  return c.coef_input * ei + c.coef_input_sq * ei * ei + c.coef_output * eo + c.coef_output_sq * eo * eo;
}

double combine(const RiskPair& pair, const Combiner& combiner) {
  if (const auto* poly = std::get_if<PolyCombiner>(&combiner)) return poly_risk(pair, *poly);
  return linear_risk(pair, std::get<LinearCombiner>(combiner).lambda);
}

MinRisk min_risk_over_set(const std::vector<CandidateRisk>& candidates, const Combiner& combiner) {
  require(!candidates.empty(), ErrorKind::EmptyIntermediateSet, "intermediate model set is empty");
  MinRisk best{combine(candidates[0].risks, combiner), candidates[0].model_id, 0};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = combine(candidates[i].risks, combiner);
    if (v < best.value) best = {v, candidates[i].model_id, i};
  }
  return best;
}

double task_metric_dM(const AffineModel& f1, const AffineModel& f2, double saturation) {
  require(saturation > 0.0, ErrorKind::InvalidArgument, "saturation M must be positive");
  require(f1.weight.rows() == f2.weight.rows() && f1.weight.cols() == f2.weight.cols() &&
              f1.intercept.size() == f2.intercept.size(),
          ErrorKind::DimensionMismatch, "models have different shapes");
  // Any weight difference makes the gap unbounded on R^d.
  if ((f1.weight - f2.weight).cwiseAbs().maxCoeff() > 1e-12) return saturation;
  return std::min(saturation, (f1.intercept - f2.intercept).norm());
}

double task_metric_dS(double distribution_distance, double model_distance) {
  return distribution_distance + model_distance;
}

namespace {

BasicCasePair with_shifted_source_input(const BasicCasePair& base, const Vector& shift) {
  const auto& s = base.source();
  Vector mean = s.mean();
  mean.head(s.dim_x()) += shift;
  return BasicCasePair(GaussianJointTask(s.dim_x(), s.dim_y(), mean, s.cov()), base.target());
}

Vector random_unit(SeededStream& stream, Eigen::Index n) {
  Vector v = stream.normal_vector(n);
  return v / v.norm();
}

}  // namespace

double continuity_probe_input(const BasicCasePair& base, double delta, int trials, SeededStream& stream) {
  require(delta >= 0.0 && trials >= 1, ErrorKind::InvalidArgument, "probe needs delta >= 0 and trials >= 1");
  if (delta == 0.0) return 0.0;
  const double c0 = basic_output_risk_w(base).total;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector u = delta * random_unit(stream, base.source().dim_x());
    const double c = basic_output_risk_w(with_shifted_source_input(base, u)).total;
    worst = std::max(worst, std::abs(c - c0) / u.norm());
  }
  return worst;
}

namespace {

template <typename Reduce>
double model_probe(const BasicCasePair& base, double delta, int trials, SeededStream& stream, double init,
                   Reduce&& reduce) {
  require(delta >= 0.0 && trials >= 1, ErrorKind::InvalidArgument, "probe needs delta >= 0 and trials >= 1");
  const AffineModel fs = fit_optimal_affine(base.source());
  const double c0 = output_risk_for_model(fs, base.target(), RiskVariant::Wasserstein).total;
  if (delta == 0.0) return 0.0;
  double acc = init;
  for (int t = 0; t < trials; ++t) {
    AffineModel f = fs;
    for (Eigen::Index j = 0; j < f.weight.size(); ++j) f.weight.data()[j] += stream.uniform(-delta, delta);
    const double c = output_risk_for_model(f, base.target(), RiskVariant::Wasserstein).total;
    acc = reduce(acc, c - c0);
  }
  return acc;
}

}  // namespace

double continuity_probe_model(const BasicCasePair& base, double delta, int trials, SeededStream& stream) {
  return model_probe(base, delta, trials, stream, 0.0,
                     [](double acc, double change) { return std::max(acc, std::abs(change)); });
}

double continuity_probe_model_min_change(const BasicCasePair& base, double delta, int trials, SeededStream& stream) {
  return model_probe(base, delta, trials, stream, INFINITY,
                     [](double acc, double change) { return std::min(acc, change); });
}

}  // namespace tlrisk
