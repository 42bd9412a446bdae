#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace kdist {

inline constexpr double PI = 3.14159265358979323846;
inline constexpr double TWO_PI = 2.0 * PI;
inline constexpr double SQRT_TWO_PI = 2.50662827463100050242;
inline constexpr double INF = std::numeric_limits<double>::infinity();

// Thrown on bad user input (CLI maps it to exit code 2).
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a computation path does not apply to the given arguments.
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical guarantee is violated (PSD check, eigensolve, ...).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; used to derive independent per-trial seeds from
// (seed, trial index) so parallel trials get disjoint streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  // 53-bit mantissa draw in (0,1); avoids the endpoints.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard normal CDF (Acklam's rational approximation polished by
// one Halley step against erfc; |error| < 1e-15 over (0,1)).
double normal_quantile(double p);

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace kdist
