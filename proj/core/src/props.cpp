#include "tlrisk/props.hpp"

#include <algorithm>
#include <cmath>

#include "tlrisk/gaussian_transfer.hpp"

namespace tlrisk {

namespace {

constexpr double kRegretRoundoff = 1e-12;

void record(SweepSummary& s, double lhs, double rhs, bool holds) {
  ++s.cases;
  if (!holds) ++s.violations;
  s.worst_margin = std::max(s.worst_margin, lhs - rhs);
}

int draw_int(SeededStream& stream, int lo, int hi) {
  const int span = hi - lo + 1;
  return lo + std::min(span - 1, static_cast<int>(stream.uniform() * span));
}

DiscreteDist random_discrete(SeededStream& stream, int k) {
  std::vector<double> w(static_cast<std::size_t>(k));
  // Exponential weights give a flat Dirichlet; cubing spreads them so that
  // some entries get close to zero.
  for (auto& x : w) x = std::pow(-std::log(stream.uniform()), 3.0);
  return DiscreteDist::smoothed(std::move(w));
}

EmpiricalSample1D random_sample(SeededStream& stream, std::size_t n) {
  const double loc = stream.uniform(-2.0, 2.0);
  const double scale = stream.uniform(0.1, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = loc + scale * stream.normal();
  return EmpiricalSample1D(std::move(v));
}

}  // namespace

SweepSummary sweep_kl_bounds(SeededStream& stream, long cases, int max_k) {
  SweepSummary s{"kl_heuristic_bounds"};
  for (long i = 0; i < cases; ++i) {
    const int k = draw_int(stream, 2, max_k);
    const DiscreteDist a = random_discrete(stream, k);
    const DiscreteDist b = random_discrete(stream, k);
    const DiscreteDist c = random_discrete(stream, k);
    const KlHeuristicBounds bounds = kl_heur_bounds(a, b, c);
    const double margin = std::max(bounds.lower - bounds.center, bounds.center - bounds.upper);
    record(s, margin, 0.0, margin <= 0.0);
  }
  return s;
}

SweepSummary sweep_w_bound(SeededStream& stream, long cases, double p) {
  SweepSummary s{p == 1.0 ? "w_relaxed_bound_p1" : p == 2.0 ? "w_relaxed_bound_p2" : "w_relaxed_bound"};
  for (long i = 0; i < cases; ++i) {
    const auto n = static_cast<std::size_t>(draw_int(stream, 1, 60));
    const EmpiricalSample1D inter = random_sample(stream, n);
    const EmpiricalSample1D target = random_sample(stream, n);
    const EmpiricalSample1D labels = random_sample(stream, n);
    const BoundCheck c = w_heur_bound_check(inter, target, labels, p);
    record(s, c.lhs, c.rhs, c.holds);
  }
  return s;
}

SweepSummary sweep_regret_bound(SeededStream& stream, long cases, int max_d) {
  SweepSummary s{"regret_lower_bound"};
  for (long i = 0; i < cases; ++i) {
    const int d = draw_int(stream, 1, max_d);
    const BasicCasePair pair(random_joint_task(stream, d, 1), random_joint_task(stream, d, 1));
    const RegretRiskIdentity id = regret_risk_identity(pair);
    const bool identity_ok = std::abs(id.regret - (id.risk_w + id.residual)) <= 1e-9 * (1.0 + id.regret);
    const bool holds = id.risk_w <= id.regret + kRegretRoundoff && identity_ok && id.residual >= -kRegretRoundoff;
    record(s, id.risk_w, id.regret, holds);
  }
  return s;
}

SweepSummary sweep_talagrand(SeededStream& stream, long cases, int max_d) {
  SweepSummary s{"talagrand_standard_reference"};
  for (long i = 0; i < cases; ++i) {
    const int d = draw_int(stream, 1, max_d);
    Vector mean(d);
    for (int j = 0; j < d; ++j) mean[j] = stream.uniform(-2.0, 2.0);
    const GaussianDist p(mean, random_spd(stream, d, 0.01, 1.0));
    const GaussianDist q(Vector::Zero(d), Matrix::Identity(d, d));
    const TalagrandDiagnostic t = talagrand_diagnostic(p, q);
    record(s, t.w2sq, t.two_kl, t.holds);
  }
  return s;
}

TalagrandDiagnostic talagrand_counterexample() {
  return talagrand_diagnostic(GaussianDist::scalar(1.0, 100.0), GaussianDist::scalar(0.0, 100.0));
}

}  // namespace tlrisk
