#pragma once

#include <string>
#include <vector>

#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"

namespace kdist {

struct MMDResult {
  double gamma_sq = 0.0;
  double gamma = 0.0;  // sqrt(max(gamma_sq, 0))
  enum class Path {
    DiscreteExact, DensityQuadrature, SpectralQuadrature, TorusSeries,
    ClosedForm, UStatistic, VStatistic
  };
  Path path = Path::DiscreteExact;
  double err_estimate = 0.0;  // quadrature/truncation bound; 0 for exact paths
};

std::string to_string(MMDResult::Path p);

MMDResult make_result(double gamma_sq, MMDResult::Path path, double err = 0.0);

// gamma^2 = sum_ij k(x_i,x_j) mu_i mu_j with mu = weights(P) - weights(Q)
// on the union support. Exact.
MMDResult gamma_sq_discrete(const Kernel& k, const Measure& P, const Measure& Q);

// gamma^2(P_n, P) for P_n = (1-1/n) d_0 + (1/n) d_n, P = d_0:
// (k(0,0) + k(n,n) - 2 k(0,n)) / n^2.
double gamma_sq_weak_sequence(const Kernel& k, int n);

// Three double integrals over quadrature rules for the densities; error from
// Richardson refinement (n vs 2n nodes).
MMDResult gamma_sq_density(const Kernel& k, const Measure& P, const Measure& Q,
                           int n = 512);

// gamma^2 = (2pi)^{-1/2} \int |phi_P - phi_Q|^2 psihat(w) dw for continuous
// spectra; finite weighted atom sum for lattice spectra. Sum kernels recurse.
MMDResult gamma_sq_spectral(const Kernel& k, const Measure& P, const Measure& Q,
                            double abs_tol = 1e-9);

// gamma^2 = (2pi)^{2d} sum_n A_psi(n) |A_P(n) - A_Q(n)|^2, truncated at
// max_j |n_j| <= N with the declared coefficient tail bound.
MMDResult gamma_sq_torus(const TorusKernel& k, const Measure& P, const Measure& Q,
                         int N = 64);

// Closed form for the Gaussian kernel exp(-(x-y)^2/(2 sk^2)) between 1-D
// Gaussians, assembled from the Gaussian-Gaussian convolution identity; the
// identity is self-tested against quadrature (tol 1e-8) on first use.
MMDResult gamma_sq_closed_gaussian(double sigma_k, const Measure& P, const Measure& Q);

// Best applicable population path for the pair.
MMDResult gamma_sq_auto(const Kernel& k, const Measure& P, const Measure& Q);

// Unbiased U-statistic (may be negative) and biased V-statistic.
MMDResult mmd_u_statistic(const Kernel& k, const Sample& X, const Sample& Y);
MMDResult mmd_v_statistic(const Kernel& k, const Sample& X, const Sample& Y);

// sup over a kernel family (Eq. of the maximal-RKHS-distance variant).
struct SupResult {
  double gamma = 0.0;
  double gamma_sq = 0.0;
  std::string best;
  double best_param = 0.0;
};

// Log-uniform bandwidth grid (61 points) + golden-section refinement.
SupResult gamma_sup_bandwidth(const std::function<KernelPtr(double)>& family,
                              const Measure& P, const Measure& Q,
                              double lo, double hi, int grid_points = 61);
// Convex hull of finitely many kernels: gamma^2 is linear in k, so the max
// over the simplex is attained at a vertex.
SupResult gamma_sup_convex(const std::vector<KernelPtr>& kernels,
                           const Measure& P, const Measure& Q);

// Kernels on the space of measures: K(P,Q) = \int\int k dP dQ and
// exp(-sigma * gamma_sq(P,Q)).
double kernel_on_measures(const Kernel& k, const Measure& P, const Measure& Q);
double gaussian_kernel_on_measures(const Kernel& k, double sigma,
                                   const Measure& P, const Measure& Q);

}  // namespace kdist
