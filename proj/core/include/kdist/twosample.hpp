#pragma once

#include <cstdint>

#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"

namespace kdist {

struct TestResult {
  double statistic = 0.0;  // gamma^2_{k,u}
  double p_value = 1.0;    // (1 + #{permuted >= observed}) / (B+1)
  int permutations = 0;
  bool reject = false;
  double level = 0.05;
  std::uint64_t seed = 0;
};

// Two-sample permutation test on the U-statistic: pools the 2m points,
// resplits uniformly B times (Gram matrix cached, so each permutation is an
// O(m^2) index sum). Deterministic given seed.
TestResult permutation_test(const Kernel& k, const Sample& X, const Sample& Y,
                            int B = 199, double level = 0.05, std::uint64_t seed = 1);

}  // namespace kdist
