#include <benchmark/benchmark.h>

#include "tlrisk/divergence.hpp"
#include "tlrisk/gaussian.hpp"
#include "tlrisk/gaussian_transfer.hpp"
#include "tlrisk/mc_oracle.hpp"
#include "tlrisk/portfolio.hpp"
#include "tlrisk/regression.hpp"
#include "tlrisk/signature.hpp"

using namespace tlrisk;

static void BM_WindowedSignature(benchmark::State& state) {
  SeededStream s(1);
  Matrix series(500, 2);
  for (Eigen::Index i = 0; i < series.rows(); ++i) series.row(i) = s.normal_vector(2).transpose();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(windowed_signature_features(series, 5, order));
  state.SetItemsProcessed(state.iterations() * (series.rows() - 4));
}
BENCHMARK(BM_WindowedSignature)->DenseRange(1, 4);

static void BM_W2Gaussian(benchmark::State& state) {
  SeededStream s(2);
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const GaussianDist p(s.normal_vector(d), random_spd(s, d, 0.1, 2.0));
  const GaussianDist q(s.normal_vector(d), random_spd(s, d, 0.1, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(w2sq_gaussian(p, q));
}
BENCHMARK(BM_W2Gaussian)->RangeMultiplier(4)->Range(1, 64);

static void BM_KlGaussian(benchmark::State& state) {
  SeededStream s(3);
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const GaussianDist p(s.normal_vector(d), random_spd(s, d, 0.1, 2.0));
  const GaussianDist q(s.normal_vector(d), random_spd(s, d, 0.1, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(kl_gaussian(p, q));
}
BENCHMARK(BM_KlGaussian)->RangeMultiplier(4)->Range(1, 64);

static void BM_EmpiricalW2(benchmark::State& state) {
  SeededStream s(4);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = s.normal(), b[i] = 1.0 + 2.0 * s.normal();
  const EmpiricalSample1D ea(a), eb(b);
  for (auto _ : state) benchmark::DoNotOptimize(wp_empirical_1d(ea, eb, 2.0));
}
BENCHMARK(BM_EmpiricalW2)->Range(1 << 8, 1 << 16);

static void BM_BasicCaseRisk(benchmark::State& state) {
  SeededStream s(5);
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const BasicCasePair pair(random_joint_task(s, d, 1), random_joint_task(s, d, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(basic_output_risk_kl(pair));
    benchmark::DoNotOptimize(basic_output_risk_w(pair));
  }
}
BENCHMARK(BM_BasicCaseRisk)->DenseRange(1, 6);

static void BM_SharpeOptimize(benchmark::State& state) {
  SeededStream s(6);
  const auto d = static_cast<Eigen::Index>(state.range(0));
  Vector mu(d);
  for (Eigen::Index i = 0; i < d; ++i) mu[i] = s.uniform(0.0, 0.1);
  const Matrix sigma = random_spd(s, d, 0.01, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(sharpe_optimize(mu, sigma, std::nullopt, 0.0, {}));
}
BENCHMARK(BM_SharpeOptimize)->RangeMultiplier(2)->Range(2, 32);

static void BM_RidgeFit(benchmark::State& state) {
  SeededStream s(7);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Matrix x(n, 14);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = s.normal_vector(14).transpose();
    y[i] = s.normal();
  }
  const RegressionDataset data(x, y);
  for (auto _ : state) benchmark::DoNotOptimize(ridge_fit(data, 1.0));
}
BENCHMARK(BM_RidgeFit)->Range(256, 1 << 15);

BENCHMARK_MAIN();
