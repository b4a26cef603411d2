#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tlrisk/transfer_risk.hpp"

using namespace tlrisk;

namespace {

struct PublishedRow {
  const char* task;
  double input_risk;
  double output_risk;
  double transfer_risk;
};

// Office-31 rows: (E^I, E^O) and the printed transfer risk.
constexpr PublishedRow kOffice31[] = {
    {"A-W", 0.181, 0.428, 0.224}, {"A-D", 0.263, 0.380, 0.214}, {"W-A", 0.181, 0.545, 0.330},
    {"W-D", 0.148, 0.084, 0.052}, {"D-A", 0.263, 0.543, 0.353}, {"D-W", 0.148, 0.412, 0.201},
};

GaussianJointTask scalar_task(double mx, double my, double vx, double cxy, double vy) {
  Vector m(2);
  m << mx, my;
  Matrix c(2, 2);
  c << vx, cxy, cxy, vy;
  return GaussianJointTask(1, 1, m, c);
}

}  // namespace

TEST(RiskPair, RejectsNegativeAndNonFinite) {
  EXPECT_THROWS_KIND(ErrorKind::NegativeRisk, RiskPair::checked(-1e-3, 0.0));
  EXPECT_THROWS_KIND(ErrorKind::NegativeRisk, RiskPair::checked(0.0, NAN));
  EXPECT_NO_THROW(RiskPair::checked(0.0, 0.0));
}

TEST(LinearRisk, Examples) {
  EXPECT_EQ(linear_risk(RiskPair::checked(0, 0), 1.0), 0.0);
  EXPECT_NEAR(linear_risk(RiskPair::checked(0.5, 0.3), 2.0), 1.3, 1e-15);
  EXPECT_THROWS_KIND(ErrorKind::NonpositiveLambda, linear_risk(RiskPair::checked(0.5, 0.3), 0.0));
  double prev = -1.0;
  for (double lam : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double v = linear_risk(RiskPair::checked(0.5, 0.3), lam);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(PolyRisk, PublishedRows) {
  for (const auto& row : kOffice31) {
    EXPECT_NEAR(poly_risk(RiskPair::checked(row.input_risk, row.output_risk), PolyCombiner::office31()),
                row.transfer_risk, 0.0025)
        << row.task;
  }
  EXPECT_EQ(poly_risk(RiskPair::checked(0, 0), PolyCombiner::office31()), 0.0);
  EXPECT_THROW(PolyCombiner({-0.1, 1.0}).validate(), Error);
}

TEST(Combiners, MonotoneInBothComponents) {
  SeededStream rng(1);
  const PolyCombiner poly{0.31, 0.92, 0.4, 0.1};
  for (int i = 0; i < 10000; ++i) {
    const RiskPair base = RiskPair::checked(rng.uniform(0, 2), rng.uniform(0, 2));
    const double di = rng.uniform(0, 1), dout = rng.uniform(0, 1);
    const RiskPair more_in = RiskPair::checked(base.input_risk + di, base.output_risk);
    const RiskPair more_out = RiskPair::checked(base.input_risk, base.output_risk + dout);
    ASSERT_GE(poly_risk(more_in, poly), poly_risk(base, poly));
    ASSERT_GE(poly_risk(more_out, poly), poly_risk(base, poly));
    ASSERT_GE(linear_risk(more_in, 0.7), linear_risk(base, 0.7));
    ASSERT_GE(linear_risk(more_out, 0.7), linear_risk(base, 0.7));
  }
}

TEST(MinRiskOverSet, Examples) {
  EXPECT_THROWS_KIND(ErrorKind::EmptyIntermediateSet, min_risk_over_set({}, LinearCombiner{}));
  const MinRisk one = min_risk_over_set({{"only", RiskPair::checked(0.2, 0.4)}}, PolyCombiner::office31());
  EXPECT_EQ(one.model_id, "only");
  EXPECT_EQ(one.index, 0u);

  const std::vector<CandidateRisk> two{{"a", RiskPair::checked(0.5, 0.3)}, {"b", RiskPair::checked(0.5, 0.1)}};
  EXPECT_EQ(min_risk_over_set(two, PolyCombiner::office31()).model_id, "b");
  EXPECT_EQ(min_risk_over_set(two, LinearCombiner{3.0}).model_id, "b");

  const std::vector<CandidateRisk> tie{{"first", RiskPair::checked(0.1, 0.1)}, {"second", RiskPair::checked(0.1, 0.1)}};
  EXPECT_EQ(min_risk_over_set(tie, LinearCombiner{}).index, 0u);
}

TEST(MinRiskOverSet, MatchesExhaustiveScan) {
  SeededStream rng(2);
  std::vector<CandidateRisk> set;
  for (int i = 0; i < 100; ++i)
    set.push_back({"m" + std::to_string(i), RiskPair::checked(rng.uniform(0, 1), rng.uniform(0, 1))});
  std::size_t arg = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& r = set[i].risks;
    const double v = 0.31 * r.input_risk + 0.92 * r.output_risk * r.output_risk;
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  const MinRisk got = min_risk_over_set(set, PolyCombiner::office31());
  EXPECT_EQ(got.index, arg);
  EXPECT_NEAR(got.value, best, 1e-15);
}

TEST(MinRiskOverSet, ArgminInvariantUnderInputRiskOffset) {
  SeededStream rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<CandidateRisk> base, shifted;
    const double offset = rng.uniform(0.1, 5.0), input = rng.uniform(0, 1);
    for (int i = 0; i < 8; ++i) {
      const double out = rng.uniform(0, 1);
      base.push_back({std::to_string(i), RiskPair::checked(input, out)});
      shifted.push_back({std::to_string(i), RiskPair::checked(input + offset, out)});
    }
    ASSERT_EQ(min_risk_over_set(base, LinearCombiner{0.8}).index, min_risk_over_set(shifted, LinearCombiner{0.8}).index);
  }
}

TEST(TaskMetrics, Examples) {
  const AffineModel f{Matrix::Constant(1, 2, 0.4), Vector::Constant(1, 0.1)};
  EXPECT_EQ(task_metric_dM(f, f, 10.0), 0.0);
  AffineModel g = f;
  g.intercept[0] += 0.3;
  EXPECT_NEAR(task_metric_dM(f, g, 10.0), 0.3, 1e-15);
  AffineModel h = f;
  h.weight(0, 1) = -0.4;
  EXPECT_EQ(task_metric_dM(f, h, 10.0), 10.0);
  // The sup over a radius-1e6 ball already exceeds M.
  Vector x = Vector::Zero(2);
  x[1] = 1e6;
  EXPECT_GT((f(x) - h(x)).norm(), 10.0);
  EXPECT_THROWS_KIND(ErrorKind::DimensionMismatch,
                     task_metric_dM(f, AffineModel{Matrix::Zero(1, 3), Vector::Zero(1)}, 1.0));

  EXPECT_EQ(task_metric_dS(0, 0), 0.0);
  EXPECT_NEAR(task_metric_dS(0.5, 0.3), 0.8, 1e-15);
  const double d_mu = std::sqrt(w2sq_gaussian(GaussianDist::scalar(0, 1), GaussianDist::scalar(0, 1)));
  EXPECT_EQ(task_metric_dS(d_mu, task_metric_dM(f, f, 1.0)), 0.0);
}

TEST(ZeroRisk, IdenticalTasksGiveZeroUnderEveryVariant) {
  SeededStream rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const GaussianJointTask t = random_joint_task(rng, 3, 1);
    const BasicCasePair pair(t, t);
    const RiskPair w = RiskPair::checked(0.0, basic_output_risk_w(pair).total);
    const RiskPair kl = RiskPair::checked(0.0, basic_output_risk_kl(pair).total);
    ASSERT_NEAR(combine(w, PolyCombiner::office31()), 0.0, 1e-10);
    ASSERT_NEAR(combine(kl, LinearCombiner{2.0}), 0.0, 1e-10);
  }
}

TEST(ContinuityProbeInput, ZeroDeltaAndBiasDominatedLadder) {
  SeededStream rng(5);
  const BasicCasePair biased(scalar_task(0.0, 0.0, 1.0, 0.6, 1.0), scalar_task(0.0, 0.8, 1.0, 0.6, 1.0));
  EXPECT_EQ(continuity_probe_input(biased, 0.0, 10, rng), 0.0);
  std::vector<double> ratios;
  for (double d : {1e-1, 1e-2, 1e-3}) ratios.push_back(continuity_probe_input(biased, d, 20, rng));
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi, 2.0 * lo);
  // The limit is |dC/du| = 2 |gap| |w_S| = 2 * 0.8 * 0.6.
  EXPECT_NEAR(ratios.back(), 0.96, 1e-3);
}

TEST(ContinuityProbeInput, IdenticalTasksStayBounded) {
  SeededStream rng(6);
  const GaussianJointTask t = random_joint_task(rng, 2, 1);
  const BasicCasePair same(t, t);
  double prev = INFINITY;
  for (double d : {1e-1, 1e-2, 1e-3}) {
    const double r = continuity_probe_input(same, d, 50, rng);
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_LE(r, prev);
    prev = r;
  }
}

TEST(ContinuityProbeModel, Examples) {
  SeededStream rng(7);
  const BasicCasePair pair(scalar_task(0.2, 0.1, 1.5, 0.9, 2.0), scalar_task(-0.1, 0.3, 1.2, 0.5, 1.0));
  EXPECT_EQ(continuity_probe_model(pair, 0.0, 5, rng), 0.0);

  const double delta = 1e-3;
  const double change = continuity_probe_model(pair, delta, 200, rng);
  EXPECT_LE(change, 10 * delta);
  // Central-difference slope of C_W in the scalar weight.
  const AffineModel fs = fit_optimal_affine(pair.source());
  auto risk_at = [&](double dw) {
    AffineModel f = fs;
    f.weight(0, 0) += dw;
    return output_risk_for_model(f, pair.target(), RiskVariant::Wasserstein).total;
  };
  const double h = 1e-6;
  const double slope = std::abs(risk_at(h) - risk_at(-h)) / (2 * h);
  EXPECT_LE(change, slope * delta + 1e-5);
  EXPECT_GE(change, 0.9 * slope * delta);

  const GaussianJointTask t = scalar_task(0.0, 0.0, 1.0, 0.4, 1.0);
  EXPECT_GE(continuity_probe_model_min_change(BasicCasePair(t, t), 1e-2, 100, rng), 0.0);
}
