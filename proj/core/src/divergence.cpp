#include "tlrisk/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tlrisk {

DiscreteDist::DiscreteDist(std::vector<double> probs) : probs_(std::move(probs)) {
  require(!probs_.empty(), ErrorKind::InvalidArgument, "discrete distribution needs at least one class");
  double total = 0.0;
  for (double v : probs_) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::InvalidArgument,
            "discrete probabilities must be strictly positive (smooth zeros before construction)");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-9, ErrorKind::InvalidArgument,
          "discrete probabilities sum to " + std::to_string(total));
}

DiscreteDist DiscreteDist::smoothed(std::vector<double> weights, double eps) {
  double total = 0.0;
  for (double& w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorKind::InvalidArgument, "weights must be nonnegative");
    w += eps;
    total += w;
  }
  for (double& w : weights) w /= total;
  return DiscreteDist(std::move(weights));
}

EmpiricalSample1D::EmpiricalSample1D(std::vector<double> values) : values_(std::move(values)) {
  require(!values_.empty(), ErrorKind::EmptySample, "empirical sample is empty");
  for (double v : values_) require(std::isfinite(v), ErrorKind::InvalidArgument, "sample has non-finite value");
}

double cross_entropy(const DiscreteDist& p, const DiscreteDist& q) {
  require(p.size() == q.size(), ErrorKind::DimensionMismatch, "cross entropy over different class counts");
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) h -= p[i] * std::log(q[i]);
  return h;
}

double entropy(const DiscreteDist& p) { return cross_entropy(p, p); }

KlHeuristicBounds kl_heur_bounds(const DiscreteDist& target_model_out, const DiscreteDist& label_law,
                                 const DiscreteDist& intermediate_out) {
  require(target_model_out.size() == label_law.size() && label_law.size() == intermediate_out.size(),
          ErrorKind::DimensionMismatch, "class counts differ");
  double lower = 0.0;
  for (double v : intermediate_out.probs()) lower += std::log(v);
  const double center = cross_entropy(target_model_out, intermediate_out) - cross_entropy(label_law, intermediate_out);
  return {lower, center, -lower};
}

namespace {

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

double sorted_pairing(const std::vector<double>& a, const std::vector<double>& b, double p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += abs_pow(a[i] - b[i], p);
  return sum / static_cast<double>(a.size());
}

double quantile_integration(const std::vector<double>& a, const std::vector<double>& b, double p) {
  // Quantile cells of a end at (i+1)/n and of b at (j+1)/m; walk the merged
  // grid in integer units of 1/(n*m).
  const auto n = static_cast<long long>(a.size());
  const auto m = static_cast<long long>(b.size());
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
  long long i = 0, j = 0, pos = 0;
  double sum = 0.0;
  while (i < n && j < m) {
    const long long end_a = (i + 1) * m;
    const long long end_b = (j + 1) * n;
    const long long end = std::min(end_a, end_b);
    sum += static_cast<double>(end - pos) * abs_pow(a[i] - b[j], p);
    pos = end;
    if (end == end_a) ++i;
    if (end == end_b) ++j;
  }
  return sum * scale;
}

}  // namespace

double wp_empirical_1d(const EmpiricalSample1D& a, const EmpiricalSample1D& b, double p, CouplingMethod method) {
  require(std::isfinite(p) && p >= 1.0, ErrorKind::InvalidArgument, "Wasserstein order must be >= 1");
  if (method == CouplingMethod::Auto) {
    method = a.size() == b.size() ? CouplingMethod::SortedPairing : CouplingMethod::QuantileIntegration;
  }
  if (method == CouplingMethod::SortedPairing) {
    require(a.size() == b.size(), ErrorKind::SizeMismatch,
            "sorted pairing needs equal sizes, got " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  std::vector<double> sa = a.values();
  std::vector<double> sb = b.values();
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return method == CouplingMethod::SortedPairing ? sorted_pairing(sa, sb, p) : quantile_integration(sa, sb, p);
}

BoundCheck w_heur_bound_check(const EmpiricalSample1D& inter_out, const EmpiricalSample1D& target_out,
                              const EmpiricalSample1D& labels, double p) {
  const double lhs = wp_empirical_1d(inter_out, target_out, p);
  const double rhs = std::pow(2.0, p - 1.0) * (wp_empirical_1d(inter_out, labels, p) + wp_empirical_1d(target_out, labels, p));
  return {lhs, rhs, lhs <= rhs + 1e-9};
}

TalagrandDiagnostic talagrand_diagnostic(const GaussianDist& p, const GaussianDist& q) {
  const double w2sq = w2sq_gaussian(p, q);
  const double two_kl = 2.0 * kl_gaussian(p, q);
  return {w2sq, two_kl, w2sq <= two_kl + 1e-12 * std::max(1.0, two_kl)};
}

}  // namespace tlrisk
