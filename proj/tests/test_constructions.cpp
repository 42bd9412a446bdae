#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "kdist/common.hpp"
#include "kdist/constructions.hpp"
#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"
#include "kdist/metrics.hpp"
#include "kdist/mmd.hpp"
#include "kdist/quadrature.hpp"

using namespace kdist;

namespace {

// quadrature oracle for phi_P(w) on a compactly supported density
std::complex<double> char_by_quadrature(const Measure& P, double w) {
  auto [lo, hi] = P.support();
  auto re = integrate([&](double x) { return P.density(x) * std::cos(w * x); }, lo, hi, 1e-10);
  auto im = integrate([&](double x) { return P.density(x) * std::sin(w * x); }, lo, hi, 1e-10);
  return {re.value, im.value};
}

void check_theta_admissible(const ConstructedPair& pair, const Measure& base,
                            const std::vector<double>& lattice) {
  REQUIRE(pair.theta.theta);
  REQUIRE(pair.theta.theta_inv);
  // vanishes at zero and is conjugate symmetric
  CHECK(std::abs(pair.theta.theta(0.0)) <= 1e-10);
  for (double w : {0.3, 1.7, 4.4}) {
    CHECK(std::abs(pair.theta.theta(w) - std::conj(pair.theta.theta(-w))) <= 1e-10);
  }
  // zero overlap with the kernel's spectral lattice
  double overlap = 0.0;
  for (double w : lattice) overlap += std::norm(pair.theta.theta(w));
  CHECK(overlap <= 1e-12);
  // the inverse transform integrates to zero and keeps the density nonnegative
  auto [lo, hi] = pair.P.support();
  auto mass = integrate(pair.theta.theta_inv, lo, hi, 1e-10);
  CHECK(std::abs(mass.value) <= 1e-8);
  for (int i = 0; i <= 2000; ++i) {
    const double x = lo + (hi - lo) * i / 2000.0;
    CHECK(base.density(x) + pair.theta.theta_inv(x) >= -1e-12);
  }
}

}  // namespace

TEST_CASE("sinusoid perturbation: validity, limits, and the shift relation") {
  const Measure q = Measure::uniform(-1.0, 1.0);
  const Measure p = perturb_sinusoid(q, 0.5, 2.0);
  CHECK_NOTHROW(p.validate());

  // characteristic function equals the quadrature oracle at random frequencies
  Rng rng(3u);
  for (int rep = 0; rep < 50; ++rep) {
    const double w = 30.0 * uniform01(rng) - 15.0;
    CHECK(std::abs(p.char_function(w) - char_by_quadrature(p, w)) <= 1e-6);
  }
  // ... and satisfies the three-term shift identity against the base measure
  const double alpha = 0.5, nu = 2.0;
  for (double w : {0.4, 1.3, 5.2}) {
    const std::complex<double> expect =
        q.char_function(w) +
        std::complex<double>(0.0, 0.5 * alpha) *
            (q.char_function(w - nu * PI) - q.char_function(w + nu * PI));
    CHECK(std::abs(p.char_function(w) - expect) <= 1e-10);
  }

  // vanishing amplitude: the pair is numerically indistinguishable
  const Measure p0 = perturb_sinusoid(q, 1e-12, 2.0);
  auto r = gamma_sq_spectral(*make_bspline(1), p0, q);
  CHECK(r.gamma_sq <= 1e-20);

  CHECK_THROWS_AS(perturb_sinusoid(Measure::uniform(0.0, 1.0), 0.5, 2.0),
                  validation_error);

  // Gaussian base keeps unit mass
  const Measure pg = perturb_sinusoid(Measure::gaussian(0.0, 2.0), 0.5, 7.5);
  auto m = integrate([&](double x) { return pg.density(x); }, -30.0, 30.0, 1e-10);
  CHECK(std::abs(m.value - 1.0) <= 1e-6);
}

TEST_CASE("dirichlet-uniform pair: exact zero on the lattice, positive separation") {
  auto pair = construct_dirichlet_uniform(2.0, 2, 3.0, 0.125);
  CHECK_NOTHROW(pair.P.validate());
  CHECK_NOTHROW(pair.Q.validate());

  auto r = gamma_sq_spectral(*pair.kernel, pair.P, pair.Q);
  CHECK(r.gamma_sq <= 1e-14);

  CHECK(pair.tv == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(tv(pair.P, pair.Q) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(pair.tv > 1e-3);

  // theta admissibility on the kernel's lattice 2 pi j / tau
  std::vector<double> lattice;
  for (int j = -4; j <= 4; ++j) lattice.push_back(PI * j);
  check_theta_admissible(pair, pair.Q, lattice);

  CHECK_THROWS_AS(construct_dirichlet_uniform(2.0, 2, 3.0, 0.0), validation_error);
  CHECK_THROWS_AS(construct_dirichlet_uniform(4.0, 2, 3.0, 0.125), validation_error);
  CHECK_THROWS_AS(construct_dirichlet_uniform(2.0, 2, 3.0, 0.3), validation_error);
}

TEST_CASE("sinc-cauchy pair: perturbation invisible inside the passband") {
  const double beta = TWO_PI;
  auto pair = construct_sinc_cauchy(beta, 2, 2.0 * TWO_PI, 0.02);

  auto r = gamma_sq_spectral(*pair.kernel, pair.P, pair.Q);
  CHECK(r.gamma_sq <= 1e-8);

  // the two characteristic functions coincide exactly on the passband
  for (double w : {0.0, 1.0, 3.0, 6.0, -6.2}) {
    CHECK(std::abs(pair.P.char_function(w) - pair.Q.char_function(w)) <= 1e-14);
  }
  // ... and differ inside the shifted band, so the measures are distinct
  CHECK(std::abs(pair.P.char_function(4.0 * PI) - pair.Q.char_function(4.0 * PI)) > 1e-4);
  CHECK(pair.tv > 1e-3);

  // unit mass: the Cauchy base carries 1 and the perturbation integrates to 0
  auto g = integrate([&](double x) { return pair.P.density(x) - pair.Q.density(x); },
                     -2e4, 2e4, 1e-8);
  CHECK(std::abs(g.value) <= 1e-6 + g.err);

  CHECK_THROWS_AS(construct_sinc_cauchy(beta, 2, 2.0 * TWO_PI, 0.0), validation_error);
  CHECK_THROWS_AS(construct_sinc_cauchy(beta, 2, 2.0 * TWO_PI, 5.0), validation_error);
  CHECK_THROWS_AS(construct_sinc_cauchy(beta, 3, 2.0 * TWO_PI, 0.02), validation_error);
  CHECK_THROWS_AS(construct_sinc_cauchy(beta, 2, 0.5 * beta, 0.02), validation_error);
}

TEST_CASE("torus flat-plus-sinusoid pair") {
  Eigen::VectorXi n0(1);
  n0[0] = 3;
  auto pair = construct_torus_flat(1, n0, 0.25 / TWO_PI);
  CHECK_NOTHROW(pair.P.validate());

  // coefficient oracle: A_P(n0) - A_Q(n0) has modulus alpha
  const auto d3 = pair.P.torus_fourier_coeff(n0) - pair.Q.torus_fourier_coeff(n0);
  CHECK(std::abs(d3) == doctest::Approx(0.25 / TWO_PI).epsilon(1e-9));

  auto dk = std::dynamic_pointer_cast<const TorusKernel>(
      make_torus({TorusKernelSpec::Family::Dirichlet, 0.5, 2, {}, {}, false}, 1));
  CHECK(gamma_sq_torus(*dk, pair.P, pair.Q).gamma_sq == doctest::Approx(0.0));

  auto pk = std::dynamic_pointer_cast<const TorusKernel>(
      make_torus({TorusKernelSpec::Family::Poisson, 0.5, 1, {}, {}, false}, 1));
  CHECK(gamma_sq_torus(*pk, pair.P, pair.Q).gamma_sq > 0.0);

  // the boundary amplitude touches zero density but stays admissible
  CHECK_NOTHROW(construct_torus_flat(1, n0, 0.5 / TWO_PI));
  CHECK_THROWS_AS(construct_torus_flat(1, n0, 0.6 / TWO_PI), validation_error);
}

TEST_CASE("eigen-direction construction: prediction matches direct computation") {
  auto k = make_bspline(1);
  const Measure q = Measure::uniform(-1.0, 1.0);

  auto r0 = eigen_small_mmd(*k, q, 5, 0.0);
  CHECK(r0.direct_gamma <= 1e-8);

  auto r10 = eigen_small_mmd(*k, q, 10, 0.05);
  auto r40 = eigen_small_mmd(*k, q, 40, 0.05);
  for (const auto* r : {&r10, &r40}) {
    CHECK(std::abs(r->predicted_gamma - r->direct_gamma) <=
          std::max(1e-4, 3.0 * r->err_estimate));
    // the target eigendirection is separated by about tau
    CHECK(r->separation >= 0.05 - 0.02);
    CHECK(r->pair.tv > 1e-3);
  }
  CHECK(r40.direct_gamma < r10.direct_gamma);
  CHECK(r40.lambda_l < r10.lambda_l);
}

TEST_CASE("every non-characteristic kernel gets a certified blind pair") {
  std::vector<KernelPtr> blind = {
      make_cosine(2.0), make_dirichlet_r(2), make_fejer_r(2),
      make_trivial(2.0), make_dot_product(), make_poly2(),
      make_torus({TorusKernelSpec::Family::Dirichlet, 0.5, 2, {}, {}, false}, 1)};
  for (const auto& k : blind) {
    CHECK(k->classify().verdict == Classification::Verdict::NotCharacteristic);
    auto pair = pair_with_zero_gamma(k);
    auto r = gamma_sq_auto(*k, pair.P, pair.Q);
    CHECK(std::abs(r.gamma_sq) <= 1e-8);
    CHECK(pair.tv > 1e-3);
  }
}

TEST_CASE("characteristic kernels separate a battery of distinct pairs") {
  std::vector<std::pair<Measure, Measure>> battery;
  battery.push_back({Measure::gaussian(0.0, 1.0), Measure::gaussian(1.0, 1.0)});
  battery.push_back({Measure::gaussian(0.0, 1.0), Measure::gaussian(0.0, 2.0)});
  battery.push_back({Measure::uniform(-1.0, 1.0), Measure::uniform(-2.0, 2.0)});
  battery.push_back({Measure::uniform(-1.0, 1.0), Measure::gaussian(0.0, 1.0)});
  battery.push_back({Measure::cauchy(0.0, 1.0), Measure::cauchy(1.0, 1.0)});
  battery.push_back({Measure::cauchy(0.0, 1.0), Measure::cauchy(0.0, 2.0)});
  battery.push_back(
      {Measure::perturbed(Measure::uniform(-1.0, 1.0), 0.5, 3.0), Measure::uniform(-1.0, 1.0)});
  battery.push_back({Measure::dirac(0.0), Measure::dirac(1.0)});
  battery.push_back({Measure::discrete1({{0.0, 0.5}, {2.0, 0.5}}), Measure::dirac(1.0)});
  battery.push_back({Measure::cauchy_power(2), Measure::gaussian(0.0, 1.0)});
  for (const auto& k : {make_gaussian(1.0), make_laplacian(1.0), make_bspline(1)}) {
    for (const auto& [P, Q] : battery) {
      CHECK(gamma_sq_auto(*k, P, Q).gamma_sq > 1e-6);
    }
  }
}
