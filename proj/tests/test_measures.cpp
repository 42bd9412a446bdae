#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "kdist/common.hpp"
#include "kdist/measure.hpp"
#include "kdist/quadrature.hpp"

using namespace kdist;

namespace {

// quadrature oracle for phi_P(w) = \int e^{iwx} p(x) dx on a density measure
std::complex<double> char_by_quadrature(const Measure& P, double w, double tol = 1e-9) {
  auto [lo, hi] = P.support();
  lo = std::max(lo, -1e5);
  hi = std::min(hi, 1e5);
  auto re = integrate([&](double x) { return P.density(x) * std::cos(w * x); }, lo, hi, tol);
  auto im = integrate([&](double x) { return P.density(x) * std::sin(w * x); }, lo, hi, tol);
  return {re.value, im.value};
}

double ks_distance(const Sample& s, const Measure& P) {
  std::vector<double> x = s.points;
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = P.cdf(x[i]);
    ks = std::max(ks, std::abs(F - (i + 1) / m));
    ks = std::max(ks, std::abs(F - i / m));
  }
  return ks;
}

}  // namespace

TEST_CASE("validate accepts constructor output and rejects perturbed weights") {
  std::vector<Measure> good = {
      Measure::discrete1({{0.0, 0.5}, {2.0, 0.5}}),
      Measure::gaussian(0.0, 1.0),
      Measure::cauchy(0.0, 1.0),
      Measure::uniform(-1.0, 1.0),
      Measure::cauchy_power(2),
      Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, 2.0),
      Measure::piecewise_linear({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}),
      Measure::torus_uniform(1)};
  for (const auto& m : good) CHECK_NOTHROW(m.validate());

  CHECK_THROWS_AS(Measure::discrete1({{0.0, 0.5 + 1e-3}, {2.0, 0.5}}).validate(),
                  validation_error);
  CHECK_THROWS_AS(Measure::discrete1({{0.0, 1.2}, {2.0, -0.2}}).validate(),
                  validation_error);
  CHECK_THROWS_AS(Measure::discrete1({{1.0, 0.5}, {1.0, 0.5}}).validate(),
                  validation_error);
}

TEST_CASE("characteristic functions: phi(0)=1 and conjugate symmetry") {
  std::vector<Measure> ms = {Measure::discrete1({{-1.0, 0.25}, {0.5, 0.75}}),
                             Measure::gaussian(0.3, 1.7),
                             Measure::cauchy(-0.2, 0.8),
                             Measure::uniform(-2.0, 3.0),
                             Measure::cauchy_power(2),
                             Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, 2.0)};
  Rng rng(99u);
  for (const auto& m : ms) {
    CHECK(std::abs(m.char_function(0.0) - 1.0) <= 1e-10);
    for (int rep = 0; rep < 20; ++rep) {
      const double w = 20.0 * uniform01(rng) - 10.0;
      const auto a = m.char_function(w);
      const auto b = m.char_function(-w);
      CHECK(std::abs(a - std::conj(b)) <= 1e-10);
      CHECK(std::abs(a) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("closed-form characteristic functions agree with quadrature") {
  const Measure cau = Measure::cauchy(0.0, 1.0);
  const Measure uni = Measure::uniform(-2.0, 2.0);
  const Measure per = Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, 2.0);
  for (double w : {0.3, 1.0, 2.5, 7.0}) {
    CHECK(std::abs(cau.char_function(w) - std::exp(-std::abs(w))) <= 1e-10);
    CHECK(std::abs(uni.char_function(w) - std::sin(2.0 * w) / (2.0 * w)) <= 1e-12);
    CHECK(std::abs(per.char_function(w) - char_by_quadrature(per, w)) <= 1e-7);
    CHECK(std::abs(cau.char_function(w) - char_by_quadrature(cau, w, 1e-10)) <= 1e-4);
  }
  // Gaussian closed form
  const Measure g = Measure::gaussian(1.0, 2.0);
  for (double w : {0.5, 1.5}) {
    const std::complex<double> expect =
        std::exp(std::complex<double>(-0.5 * 4.0 * w * w, w));
    CHECK(std::abs(g.char_function(w) - expect) <= 1e-12);
  }
}

TEST_CASE("sinusoid-perturbed measures keep unit mass and nonnegativity") {
  for (double nu : {1.0, 2.0, 3.5, 7.5}) {
    const Measure p = Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, nu);
    auto r = integrate([&](double x) { return p.density(x); }, -1.0, 1.0, 1e-10);
    CHECK(std::abs(r.value - 1.0) <= 1e-6);
  }
  const Measure pg = Measure::perturbed(Measure::gaussian(0.0, 2.0), 0.5, 7.5);
  auto rg = integrate([&](double x) { return pg.density(x); }, -30.0, 30.0, 1e-10);
  CHECK(std::abs(rg.value - 1.0) <= 1e-6);
  for (double x = -3.0; x <= 3.0; x += 0.01) CHECK(pg.density(x) >= 0.0);
  // asymmetric base is rejected; so is |alpha| > 1
  CHECK_THROWS_AS(Measure::perturbed(Measure::uniform(0.0, 1.0), 0.5, 2.0),
                  validation_error);
  CHECK_THROWS_AS(Measure::perturbed(Measure::uniform(-1.0, 1.0), 1.5, 2.0),
                  validation_error);
}

TEST_CASE("cdf closed forms and monotonicity") {
  CHECK(Measure::uniform(0.0, 1.0).cdf(0.25) == doctest::Approx(0.25));
  CHECK(Measure::discrete1({{0.0, 0.5}, {2.0, 0.5}}).cdf(1.0) == doctest::Approx(0.5));
  CHECK(Measure::cauchy(0.0, 1.0).cdf(0.0) == doctest::Approx(0.5));
  CHECK(Measure::gaussian(0.0, 1.0).cdf(1.0) == doctest::Approx(normal_cdf(1.0)));
  const Measure cp = Measure::cauchy_power(2);
  double prev = -1.0;
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double F = cp.cdf(x);
    CHECK(F >= prev - 1e-12);
    CHECK(F >= 0.0);
    CHECK(F <= 1.0);
    prev = F;
  }
  CHECK(cp.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("sampling is deterministic and matches the cdf (smoke)") {
  const Measure d = Measure::discrete1({{0.0, 1.0}});
  auto s = d.sample(5, 42u);
  REQUIRE(s.points.size() == 5u);
  for (double x : s.points) CHECK(x == doctest::Approx(0.0));

  const Measure u = Measure::uniform(-1.0, 1.0);
  auto s1 = u.sample(10000, 7u);
  auto s2 = u.sample(10000, 7u);
  CHECK(s1.points == s2.points);
  double mean = 0.0;
  for (double x : s1.points) mean += x;
  mean /= 1e4;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(3.0e4));

  const int m = 10000;
  std::vector<Measure> ms = {Measure::uniform(-1.0, 1.0), Measure::gaussian(0.5, 2.0),
                             Measure::cauchy(0.0, 1.0), Measure::cauchy_power(2),
                             Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, 2.0)};
  std::uint64_t seed = 1234u;
  for (const auto& msr : ms) {
    auto s3 = msr.sample(m, seed++);
    CHECK(ks_distance(s3, msr) < 2.0 / std::sqrt(static_cast<double>(m)));
  }
}

TEST_CASE("quadrature rules integrate their own density to unit mass") {
  std::vector<Measure> ms = {Measure::uniform(-1.0, 1.0), Measure::gaussian(0.0, 1.0),
                             Measure::cauchy(0.0, 1.0), Measure::cauchy_power(2),
                             Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, 2.0),
                             Measure::piecewise_linear({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0})};
  for (const auto& msr : ms) {
    Rule r = msr.quadrature_rule(512);
    double mass = 0.0, mean_abs = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      mass += r.w[i];
      mean_abs += r.w[i] * r.x[i];
    }
    (void)mean_abs;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("torus measures: Fourier coefficients of the uniform density") {
  const Measure u = Measure::torus_uniform(1);
  Eigen::VectorXi n(1);
  n[0] = 0;
  CHECK(std::abs(u.torus_fourier_coeff(n) - 1.0 / TWO_PI) <= 1e-12);
  for (int j : {1, -1, 3, 5}) {
    n[0] = j;
    CHECK(std::abs(u.torus_fourier_coeff(n)) <= 1e-12);
  }
}

TEST_CASE("support intervals contain essentially all mass") {
  for (const auto& msr : {Measure::gaussian(1.0, 2.0), Measure::cauchy_power(3),
                          Measure::uniform(-2.0, 5.0)}) {
    auto [lo, hi] = msr.support();
    CHECK(msr.cdf(lo) <= 1e-9);
    CHECK(msr.cdf(hi) >= 1.0 - 1e-9);
  }
}
