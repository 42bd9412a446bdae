#pragma once

#include <complex>
#include <functional>
#include <string>

#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"
#include "kdist/mmd.hpp"

namespace kdist {

// A spectral perturbation theta with inverse transform theta_inv added to a
// base density; carries the data needed to check the admissibility conditions
// (conjugate symmetry, theta(0)=0, zero spectral overlap, positivity).
struct ThetaPerturbation {
  std::function<std::complex<double>(double)> theta;
  std::function<double(double)> theta_inv;
  // intervals (union) where theta may be nonzero
  std::vector<std::pair<double, double>> support;
  std::string describe;
};

struct ConstructedPair {
  Measure P;
  Measure Q;
  KernelPtr kernel;
  double predicted_gamma_sq = 0.0;
  std::string provenance;   // how predicted_gamma_sq was obtained
  double tv = 0.0;          // separation certificate: TV(P,Q)
  ThetaPerturbation theta;  // empty closures when not theta-based
};

// p = q (1 + alpha sin(nu pi x)); base must be an even density, |alpha| <= 1.
Measure perturb_sinusoid(const Measure& q, double alpha, double nu);

// Cauchy base + band-limited perturbation invisible to the sinc kernel of
// cutoff beta: p = q + 2^N alpha sin(w0 x) sin^N(beta x/2) / (sqrt(2pi) x^N).
// Requires N >= 2, |w0| >= (N+2) beta/2, and alpha within the numerically
// computed positivity bound (with a 10% safety margin).
ConstructedPair construct_sinc_cauchy(double beta, int N, double w0, double alpha);

// Uniform base on [-beta,beta] + triangular perturbation whose transform
// vanishes on the lattice 2pi j/tau, paired with the period-tau Dirichlet
// kernel of order l. Exact piecewise-linear representation.
ConstructedPair construct_dirichlet_uniform(double tau, int l, double beta, double alpha);

// Torus pair: p = (2pi)^{-d} - 2 alpha sin(n0.x) against the uniform density;
// gamma = 0 for any torus kernel with A_psi(n0) = 0.
ConstructedPair construct_torus_flat(int d, const Eigen::VectorXi& n0, double alpha);

// Nystrom eigen-direction construction: p = q + alpha_l e + tau phi_l with
// e = 1, alpha_l = -tau e~_l / sum_j e~_j^2, using the kernel integral
// operator on the grid (Lebesgue base measure on the compact interval).
struct EigenSmallResult {
  ConstructedPair pair;
  double predicted_gamma = 0.0;
  double direct_gamma = 0.0;
  double err_estimate = 0.0;
  double lambda_l = 0.0;
  double separation = 0.0;  // |P phi_l - Q phi_l|
};
EigenSmallResult eigen_small_mmd(const Kernel& k, const Measure& q_grid, int l,
                                 double tau, int grid_points = 512);

// For a kernel classified NotCharacteristic, produce a P != Q with gamma = 0
// (the certificate used by the discrimination test battery).
ConstructedPair pair_with_zero_gamma(const KernelPtr& k);

}  // namespace kdist
