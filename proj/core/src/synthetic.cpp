#include "tlrisk/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <utility>

namespace tlrisk {

AssetSeries simulate_asset(SeededStream& stream, Eigen::Index length, const SharedDynamics& dyn, std::string name) {
  require(length >= 2, ErrorKind::InvalidArgument, "asset length must be at least 2");
  AssetSeries a;
  a.name = std::move(name);
  a.close.resize(length);
  a.volume.resize(length);
  const double log_price0 = std::log(stream.uniform(20.0, 200.0));
  const double log_volume_mean = std::log(stream.uniform(1e5, 1e7));
  // Start u and r from their stationary laws.
  double u = dyn.volume_noise / std::sqrt(1.0 - dyn.volume_ar * dyn.volume_ar) * stream.normal();
  double r = 0.0;
  double log_price = log_price0;
  for (Eigen::Index t = 0; t < length; ++t) {
    const double u_next = dyn.volume_ar * u + dyn.volume_noise * stream.normal();
    r = dyn.ar * r + dyn.volume_beta * (u_next - u) + dyn.noise * stream.normal();
    u = u_next;
    if (t > 0) log_price += r;
    a.close[t] = std::exp(log_price);
    a.volume[t] = std::exp(log_volume_mean + u);
  }
  return a;
}

TransferTask shared_dynamics_task(SeededStream& stream, const SharedDynamicsSetup& setup) {
  require(setup.sources >= 1, ErrorKind::InvalidArgument, "need at least one source asset");
  require(setup.test_length < setup.target_length && setup.test_length < setup.source_length,
          ErrorKind::InvalidArgument, "test period must leave some training history");
  TransferTask task{{}, {AssetSeries{}, 0}};
  for (int i = 0; i < setup.sources; ++i) {
    SeededStream s = stream.split(static_cast<std::uint64_t>(i) + 1);
    task.sources.push_back({simulate_asset(s, setup.source_length, setup.dynamics, "source" + std::to_string(i)),
                            setup.source_length - setup.test_length});
  }
  SeededStream s = stream.split(0);
  task.target = {simulate_asset(s, setup.target_length, setup.dynamics, "target"),
                 setup.target_length - setup.test_length};
  return task;
}

namespace {

Matrix gaussian_rows(SeededStream& stream, const Vector& mu, const Matrix& chol, Eigen::Index n) {
  Matrix out(n, mu.size());
  for (Eigen::Index t = 0; t < n; ++t) out.row(t) = (mu + chol * stream.normal_vector(mu.size())).transpose();
  return out;
}

}  // namespace

PortfolioPair synthetic_portfolio_pair(SeededStream& stream, double shift, const PortfolioPairSetup& setup) {
  const Eigen::Index d = setup.assets;
  require(d >= 2, ErrorKind::InvalidArgument, "need at least two assets");
  const double v = setup.volatility * setup.volatility;
  Matrix sigma = Matrix::Constant(d, d, setup.correlation * v);
  sigma.diagonal().setConstant(v);
  const Matrix chol = sigma.llt().matrixL();

  auto shuffled = [&] {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(stream.uniform() * static_cast<double>(i + 1));
      std::swap(perm[i], perm[std::min(j, i)]);
    }
    return perm;
  };
  const std::vector<Eigen::Index> order = shuffled();
  Vector mu_s(d);
  for (Eigen::Index j = 0; j < d; ++j)
    mu_s[j] = setup.max_mean * static_cast<double>(order[static_cast<std::size_t>(j)]) / static_cast<double>(d - 1);
  const std::vector<Eigen::Index> perm = shuffled();
  Vector mu_t(d);
  for (Eigen::Index j = 0; j < d; ++j)
    mu_t[j] = (1.0 - shift) * mu_s[j] + shift * mu_s[perm[static_cast<std::size_t>(j)]];

  return PortfolioPair{ReturnsDataset(gaussian_rows(stream, mu_s, chol, setup.source_periods)),
                       ReturnsDataset(gaussian_rows(stream, mu_t, chol, setup.target_train_periods)),
                       ReturnsDataset(gaussian_rows(stream, mu_t, chol, setup.target_test_periods)), shift};
}

}  // namespace tlrisk
