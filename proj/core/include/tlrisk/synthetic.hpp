#pragma once

// Seeded synthetic data for the regression and portfolio pipelines: assets
// that share one return/volume dynamic, and Gaussian source/target return
// pairs whose means drift apart by a controlled amount.

#include <string>
#include <vector>

#include "tlrisk/mc_oracle.hpp"
#include "tlrisk/portfolio.hpp"
#include "tlrisk/regression.hpp"

namespace tlrisk {

/// r_t = ar r_{t-1} + volume_beta (u_t - u_{t-1}) + noise e_t and
/// u_t = volume_ar u_{t-1} + volume_noise e'_t, where r is the log return
/// and u the demeaned log volume.
struct SharedDynamics {
  double ar = 0.3;
  double volume_beta = 0.05;
  double noise = 0.01;
  double volume_ar = 0.7;
  double volume_noise = 0.2;
};

AssetSeries simulate_asset(SeededStream& stream, Eigen::Index length, const SharedDynamics& dynamics,
                           std::string name);

struct SharedDynamicsSetup {
  int sources = 10;
  Eigen::Index source_length = 1000;
  Eigen::Index target_length = 300;
  /// Number of trailing prices in the test period, common to every asset.
  Eigen::Index test_length = 200;
  SharedDynamics dynamics{};
};

struct TransferTask {
  std::vector<SplitSeries> sources;
  SplitSeries target;
};

/// Sources and the target share the dynamics; the target has a short
/// training history.
TransferTask shared_dynamics_task(SeededStream& stream, const SharedDynamicsSetup& setup = {});

struct PortfolioPair {
  ReturnsDataset source_train;
  ReturnsDataset target_train;
  ReturnsDataset target_test;
  /// Mixing weight s of the target mean (1 - s) mu_S + s pi(mu_S).
  double shift;
};

struct PortfolioPairSetup {
  Eigen::Index assets = 5;
  Eigen::Index source_periods = 500;
  Eigen::Index target_train_periods = 40;
  Eigen::Index target_test_periods = 500;
  double volatility = 0.2;
  double correlation = 0.3;
  double max_mean = 0.1;
};

/// Returns are N(mu, Sigma) with an exchangeable Sigma. mu_S is a random
/// permutation of the grid max_mean * j / (d - 1), so every pair offers the
/// same best source Sharpe ratio; the target mean is a convex mix of mu_S
/// and a random permutation of it.
PortfolioPair synthetic_portfolio_pair(SeededStream& stream, double shift, const PortfolioPairSetup& setup = {});

}  // namespace tlrisk
