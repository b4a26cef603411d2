#pragma once

// Discrete and one-dimensional empirical divergences, plus diagnostics for
// the cross-entropy bounds, the Wasserstein relaxed upper bound and the
// W2-versus-KL (Talagrand) comparison.

#include <vector>

#include "tlrisk/gaussian.hpp"

namespace tlrisk {

/// Probability vector with strictly positive entries summing to one.
class DiscreteDist {
 public:
  explicit DiscreteDist(std::vector<double> probs);

  /// Adds eps to every entry and renormalizes, so that exact zeros become
  /// admissible.
  static DiscreteDist smoothed(std::vector<double> weights, double eps = 1e-12);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

class EmpiricalSample1D {
 public:
  explicit EmpiricalSample1D(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// -sum_i p(i) log q(i).
double cross_entropy(const DiscreteDist& p, const DiscreteDist& q);
double entropy(const DiscreteDist& p);

struct KlHeuristicBounds {
  double lower;
  double center;
  double upper;
};

/// center = H(target_model_out, intermediate_out) - H(label_law, intermediate_out),
/// bracketed by +/- sum_i log intermediate_out(i).
KlHeuristicBounds kl_heur_bounds(const DiscreteDist& target_model_out, const DiscreteDist& label_law,
                                 const DiscreteDist& intermediate_out);

enum class CouplingMethod {
  /// Pick SortedPairing for equal sizes, QuantileIntegration otherwise.
  Auto,
  /// Pair order statistics; requires equal sample sizes.
  SortedPairing,
  /// Integrate |F^-1(u) - G^-1(u)|^p exactly over the merged quantile grid.
  QuantileIntegration,
};

/// W_p(a, b)^p between two empirical measures in 1D (sorted quantile
/// coupling, which is optimal for every p >= 1).
double wp_empirical_1d(const EmpiricalSample1D& a, const EmpiricalSample1D& b, double p,
                       CouplingMethod method = CouplingMethod::Auto);

struct BoundCheck {
  double lhs;
  double rhs;
  bool holds;
};

/// lhs = W_p(inter, target)^p, rhs = 2^{p-1} [W_p(inter, labels)^p + W_p(target, labels)^p].
BoundCheck w_heur_bound_check(const EmpiricalSample1D& inter_out, const EmpiricalSample1D& target_out,
                              const EmpiricalSample1D& labels, double p);

struct TalagrandDiagnostic {
  double w2sq;
  double two_kl;
  bool holds;
};

/// Reports W2^2(p, q) and 2 KL(p || q) side by side. The inequality is only
/// guaranteed for a standard normal reference, so this is data, not a check.
TalagrandDiagnostic talagrand_diagnostic(const GaussianDist& p, const GaussianDist& q);

}  // namespace tlrisk
