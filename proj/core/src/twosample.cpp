#include "kdist/twosample.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

namespace kdist {
namespace {

// U-statistic from a cached Gram matrix and an index split
double u_stat(const Eigen::MatrixXd& G, const std::vector<int>& idx, int m) {
  const int N = static_cast<int>(idx.size());
  const int n = N - m;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) sxx += G(idx[i], idx[j]);
  for (int i = m; i < N; ++i)
    for (int j = m; j < N; ++j)
      if (i != j) syy += G(idx[i], idx[j]);
  for (int i = 0; i < m; ++i)
    for (int j = m; j < N; ++j) sxy += G(idx[i], idx[j]);
  return sxx / (double(m) * (m - 1)) + syy / (double(n) * (n - 1)) -
         2.0 * sxy / (double(m) * n);
}

}  // namespace

TestResult permutation_test(const Kernel& k, const Sample& X, const Sample& Y,
                            int B, double level, std::uint64_t seed) {
  const int m = static_cast<int>(X.points.size());
  const int n = static_cast<int>(Y.points.size());
  if (m < 2 || n < 2) throw validation_error("permutation_test: need >= 2 points per sample");
  if (B < 1) throw validation_error("permutation_test: B >= 1");
  if (!(level > 0 && level < 1)) throw validation_error("permutation_test: level in (0,1)");

  std::vector<double> pool(X.points);
  pool.insert(pool.end(), Y.points.begin(), Y.points.end());
  const int N = m + n;
  Eigen::MatrixXd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = k(pool[i], pool[j]);

  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  const double observed = u_stat(G, idx, m);

  int exceed = 0;
  Rng rng(mix_seed(seed, 0));
  for (int b = 0; b < B; ++b) {
    for (int i = N - 1; i > 0; --i) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(idx[i], idx[j]);
    }
    if (u_stat(G, idx, m) >= observed) ++exceed;
  }

  TestResult out;
  out.statistic = observed;
  out.permutations = B;
  out.p_value = (1.0 + exceed) / (B + 1.0);
  out.level = level;
  out.reject = out.p_value <= level;
  out.seed = seed;
  return out;
}

}  // namespace kdist
