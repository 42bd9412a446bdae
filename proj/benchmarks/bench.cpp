#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kdist/common.hpp"
#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"
#include "kdist/metrics.hpp"
#include "kdist/mmd.hpp"
#include "kdist/quadrature.hpp"
#include "kdist/twosample.hpp"

using namespace kdist;

namespace {

Sample draw(const Measure& m, int n, std::uint64_t seed) { return m.sample(n, seed); }

Measure random_discrete(Rng& rng, int n) {
  std::vector<std::pair<double, double>> atoms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = uniform01(rng) + 0.05;
    atoms.push_back({6.0 * uniform01(rng) - 3.0 + 1e-7 * i, w});
    total += w;
  }
  for (auto& a : atoms) a.second /= total;
  return Measure::discrete1(atoms);
}

}  // namespace

static void BM_GramMatrix(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto k = make_gaussian(1.0);
  auto X = draw(Measure::gaussian(0.0, 1.0), m, 1u);
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) acc += (*k)(X.points[i], X.points[j]);
    benchmark::DoNotOptimize(acc);
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_GramMatrix)->Arg(64)->Arg(128)->Arg(256)->Complexity();

static void BM_UStatistic(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto k = make_gaussian(1.0);
  auto X = draw(Measure::gaussian(0.0, 1.0), m, 2u);
  auto Y = draw(Measure::gaussian(1.0, 1.0), m, 3u);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mmd_u_statistic(*k, X, Y).gamma_sq);
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_UStatistic)->Arg(50)->Arg(100)->Arg(200)->Complexity();

static void BM_AdaptiveQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    auto r = integrate([](double x) { return std::exp(-x * x) * std::cos(8.0 * x); },
                       -10.0, 10.0, 1e-10);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_AdaptiveQuadrature);

static void BM_SpectralGamma(benchmark::State& state) {
  auto k = make_bspline(1);
  const Measure q = Measure::uniform(-1.0, 1.0);
  const Measure p = Measure::perturbed(q, 0.5, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_sq_spectral(*k, p, q).gamma_sq);
  }
}
BENCHMARK(BM_SpectralGamma);

static void BM_Transport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(5u);
  const Measure P = random_discrete(rng, n);
  const Measure Q = random_discrete(rng, n);
  auto rho = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return (x - y).norm();
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein_discrete(P, Q, rho));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Transport)->Arg(8)->Arg(16)->Arg(32)->Complexity();

static void BM_PermutationTest(benchmark::State& state) {
  auto k = make_gaussian(1.0);
  auto X = draw(Measure::gaussian(0.0, 1.0), 100, 8u);
  auto Y = draw(Measure::gaussian(1.0, 1.0), 100, 9u);
  for (auto _ : state) {
    benchmark::DoNotOptimize(permutation_test(*k, X, Y, 99, 0.05, 1u).p_value);
  }
}
BENCHMARK(BM_PermutationTest);

BENCHMARK_MAIN();
