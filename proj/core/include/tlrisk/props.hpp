#pragma once

// Randomized sweeps over the inequalities the library relies on. Each
// sweep draws its cases from a caller-provided stream and counts failures.

#include <limits>
#include <string>

#include "tlrisk/divergence.hpp"
#include "tlrisk/mc_oracle.hpp"

namespace tlrisk {

struct SweepSummary {
  std::string name;
  long cases = 0;
  long violations = 0;
  /// Largest observed lhs - rhs over all cases (<= 0 when all hold).
  double worst_margin = -std::numeric_limits<double>::infinity();

  bool passed() const noexcept { return cases > 0 && violations == 0; }
};

/// lower <= center <= upper for random discrete triples with K in [2, max_k].
SweepSummary sweep_kl_bounds(SeededStream& stream, long cases, int max_k = 20);

/// W_p relaxed upper bound on random empirical triples.
SweepSummary sweep_w_bound(SeededStream& stream, long cases, double p);

/// On random basic-case pairs with d in [1, max_d]: C_W <= R + 1e-12,
/// |R - (C_W + residual)| <= 1e-9 (1 + R) and residual >= -1e-12. The
/// slack is round-off: C_W = R exactly when the weights are parallel.
SweepSummary sweep_regret_bound(SeededStream& stream, long cases, int max_d = 6);

/// W2^2 <= 2 KL against N(0, I) for random p with cov <= I, d in [1, max_d].
SweepSummary sweep_talagrand(SeededStream& stream, long cases, int max_d = 4);

/// N(1, 100) against N(0, 100): the comparison fails for this pair.
TalagrandDiagnostic talagrand_counterexample();

}  // namespace tlrisk
