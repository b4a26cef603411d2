#include "tlrisk/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tlrisk {

ReturnsDataset::ReturnsDataset(Matrix returns_) : returns(std::move(returns_)) {
  require(returns.rows() >= 2, ErrorKind::InsufficientHistory,
          "return history needs at least two periods, got " + std::to_string(returns.rows()));
  require(returns.cols() >= 2, ErrorKind::InvalidArgument, "a portfolio needs at least two assets");
  require(returns.allFinite(), ErrorKind::InvalidArgument, "returns have non-finite entries");
}

Portfolio::Portfolio(Vector weights) : weights_(std::move(weights)) {
  require(weights_.size() >= 1, ErrorKind::InvalidArgument, "empty portfolio");
  require(weights_.allFinite(), ErrorKind::InvalidArgument, "portfolio weights are not finite");
  require(weights_.minCoeff() >= -1e-12, ErrorKind::InvalidArgument, "portfolio weights must be nonnegative");
  require(std::abs(weights_.sum() - 1.0) <= 1e-9, ErrorKind::InvalidArgument, "portfolio weights must sum to one");
}

Portfolio Portfolio::uniform(Eigen::Index d) {
  return Portfolio(Vector::Constant(d, 1.0 / static_cast<double>(d)));
}

Vector project_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += u[static_cast<std::size_t>(k)];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

Moments estimate_moments(const ReturnsDataset& data) {
  const double t = static_cast<double>(data.periods());
  Moments m;
  m.mu = data.returns.colwise().mean().transpose();
  const Matrix centered = data.returns.rowwise() - m.mu.transpose();
  m.sigma = symmetrized(centered.transpose() * centered / (t - 1.0));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.sigma);
  if (eig.eigenvalues().minCoeff() < 0.0) {
    const Vector clamped = eig.eigenvalues().cwiseMax(0.0);
    m.sigma = symmetrized(eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose());
  }
  return m;
}

double sharpe_ratio(const Portfolio& portfolio, const Vector& mu, const Matrix& sigma) {
  const Vector& phi = portfolio.weights();
  require(mu.size() == phi.size() && sigma.rows() == phi.size() && sigma.cols() == phi.size(),
          ErrorKind::DimensionMismatch, "portfolio, mean and covariance dimensions differ");
  const double var = phi.dot(sigma * phi);
  require(var > 1e-14, ErrorKind::ZeroVariancePortfolio, "portfolio variance is zero");
  return mu.dot(phi) / std::sqrt(var);
}

double sharpe_objective(const Vector& phi, const Vector& mu, const Matrix& sigma, const std::optional<Vector>& anchor,
                        double penalty) {
  const double var = phi.dot(sigma * phi);
  if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
  double f = mu.dot(phi) / std::sqrt(var);
  if (anchor) f -= penalty * (phi - *anchor).squaredNorm();
  return f;
}

namespace {

void check_sigma(const Vector& mu, const Matrix& sigma) {
  require(sigma.rows() == mu.size() && sigma.cols() == mu.size(), ErrorKind::DimensionMismatch,
          "mean and covariance dimensions differ");
  require(mu.size() >= 1 && mu.allFinite() && sigma.allFinite(), ErrorKind::InvalidArgument,
          "mean and covariance must be finite");
  require(max_asymmetry(sigma) <= kSymmetryTol * std::max(1.0, sigma.cwiseAbs().maxCoeff()), ErrorKind::NonPSDSigma,
          "covariance is not symmetric");
  const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
  require(min_eigenvalue(sigma) >= -kPsdRelTol * scale, ErrorKind::NonPSDSigma,
          "covariance is not positive semidefinite");
}

// Smallest variance reachable on the simplex, by projected gradient descent
// with step 1 / L.
double min_variance(const Matrix& sigma) {
  const Eigen::Index d = sigma.rows();
  const double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(sigma, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (!(lmax > 0.0)) return 0.0;
  double best = sigma.diagonal().minCoeff();
  Vector phi = Vector::Constant(d, 1.0 / static_cast<double>(d));
  const double step = 1.0 / (2.0 * lmax);
  for (int it = 0; it < 20000; ++it) {
    const Vector next = project_simplex(phi - step * 2.0 * (sigma * phi));
    const double moved = (next - phi).norm();
    phi = next;
    if (moved <= 1e-15) break;
  }
  return std::min(best, phi.dot(sigma * phi));
}

struct Ascent {
  Vector phi;
  double objective;
  double stationarity;
  long iterations;
  bool converged;
};

class SharpeProblem {
 public:
  SharpeProblem(const Vector& mu, const Matrix& sigma, const std::optional<Vector>& anchor, double penalty)
      : mu_(mu), sigma_(sigma), anchor_(anchor), penalty_(penalty) {}

  double value(const Vector& phi) const { return sharpe_objective(phi, mu_, sigma_, anchor_, penalty_); }

  Vector gradient(const Vector& phi) const {
    const Vector sp = sigma_ * phi;
    const double var = phi.dot(sp);
    const double s = std::sqrt(var);
    Vector g = mu_ / s - (mu_.dot(phi) / (s * var)) * sp;
    if (anchor_) g -= 2.0 * penalty_ * (phi - *anchor_);
    return g;
  }

  double stationarity(const Vector& phi, const Vector& g) const {
    return (project_simplex(phi + g / (1.0 + 2.0 * penalty_)) - phi).norm();
  }

  Ascent ascend(Vector phi, const SharpeOptions& opt) const {
    double f = value(phi);
    double eta = opt.initial_step;
    long it = 0;
    for (; it < opt.max_iterations; ++it) {
      const Vector g = gradient(phi);
      const double stat = stationarity(phi, g);
      if (stat <= opt.tolerance) return {phi, f, stat, it, true};
      bool moved = false;
      while (eta > 1e-300) {
        Vector cand = project_simplex(phi + eta * g);
        const double fc = value(cand);
        if (fc >= f) {
          moved = cand != phi;
          phi = std::move(cand);
          f = fc;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
      eta = std::min(eta * 2.0, 1e6);
    }
    const double stat = stationarity(phi, gradient(phi));
    return {phi, f, stat, it, stat <= opt.tolerance};
  }

 private:
  const Vector& mu_;
  const Matrix& sigma_;
  const std::optional<Vector>& anchor_;
  double penalty_;
};

}  // namespace

SharpeResult sharpe_optimize(const Vector& mu, const Matrix& sigma, const std::optional<Portfolio>& anchor,
                             double penalty, const SharpeOptions& options) {
  check_sigma(mu, sigma);
  require(penalty >= 0.0 && std::isfinite(penalty), ErrorKind::InvalidArgument, "penalty must be nonnegative");
  if (anchor)
    require(anchor->size() == mu.size(), ErrorKind::DimensionMismatch, "anchor portfolio dimension differs");
  const double scale = std::max(Eigen::SelfAdjointEigenSolver<Matrix>(sigma, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .maxCoeff(),
                                1e-300);
  require(min_variance(sigma) > 1e-12 * scale, ErrorKind::DegenerateVariance,
          "a feasible portfolio has zero variance, the Sharpe ratio is undefined there");

  const Eigen::Index d = mu.size();
  std::optional<Vector> anchor_w;
  if (anchor) anchor_w = anchor->weights();
  const SharpeProblem problem(mu, sigma, anchor_w, anchor ? penalty : 0.0);

  std::vector<Vector> starts;
  starts.push_back(Vector::Constant(d, 1.0 / static_cast<double>(d)));
  for (Eigen::Index j = 0; j < d; ++j) starts.push_back(Vector::Unit(d, j));
  if (anchor_w) starts.push_back(*anchor_w);

  std::optional<Ascent> best;
  for (const auto& s : starts) {
    Ascent a = problem.ascend(s, options);
    if (!best || a.objective > best->objective) best = std::move(a);
  }
  return {Portfolio(best->phi), best->objective, best->stationarity, best->iterations, best->converged};
}

double prescreen_risk_w2(const ReturnsDataset& source, const ReturnsDataset& target) {
  require(source.assets() == target.assets(), ErrorKind::DimensionMismatch,
          "source has " + std::to_string(source.assets()) + " assets but target has " +
              std::to_string(target.assets()));
  const Moments s = estimate_moments(source);
  const Moments t = estimate_moments(target);
  return w2sq_gaussian(GaussianDist(s.mu, s.sigma), GaussianDist(t.mu, t.sigma));
}

PortfolioOutcome run_portfolio_transfer(const ReturnsDataset& source_train, const ReturnsDataset& target_train,
                                        const ReturnsDataset& target_test, double penalty,
                                        const SharpeOptions& options) {
  require(source_train.assets() == target_train.assets() && target_train.assets() == target_test.assets(),
          ErrorKind::DimensionMismatch, "source and target return files have different asset counts");
  const Moments src = estimate_moments(source_train);
  const Moments tgt = estimate_moments(target_train);
  const Moments test = estimate_moments(target_test);

  const Portfolio pre = sharpe_optimize(src.mu, src.sigma, std::nullopt, 0.0, options).portfolio;
  const Portfolio transferred = sharpe_optimize(tgt.mu, tgt.sigma, pre, penalty, options).portfolio;
  const Portfolio direct = sharpe_optimize(tgt.mu, tgt.sigma, std::nullopt, 0.0, options).portfolio;

  return PortfolioOutcome{
      pre,
      transferred,
      direct,
      sharpe_ratio(pre, tgt.mu, tgt.sigma),
      sharpe_ratio(transferred, tgt.mu, tgt.sigma),
      sharpe_ratio(direct, tgt.mu, tgt.sigma),
      sharpe_ratio(pre, test.mu, test.sigma),
      sharpe_ratio(transferred, test.mu, test.sigma),
      sharpe_ratio(direct, test.mu, test.sigma),
      prescreen_risk_w2(source_train, target_test),
  };
}

}  // namespace tlrisk
