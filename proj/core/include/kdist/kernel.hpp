#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kdist/common.hpp"

namespace kdist {

// Bochner spectrum of a translation-invariant kernel, in the symmetric
// Fourier convention f^(w) = (2pi)^{-1/2} \int e^{-iwx} f(x) dx, so that
// psi(x) = \int e^{-ixw} dLambda(w) with dLambda = (2pi)^{-1/2} psihat dw.
// Lattice atoms store Lambda-weights directly: psi(x) = sum_j w_j e^{-i x w_j}.
struct SpectrumInfo {
  enum class Kind { ContinuousDensity, Lattice, TorusCoefficients };
  enum class Support {
    AllOfSpace,           // supp(Lambda) = R^d
    CompactSet,           // proper subset with nonempty interior
    LatticeSet,           // countable set, empty interior (kernels on R)
    AllOfIntegerLattice,  // torus: A(n) > 0 for all n != 0
    ProperSubsetOfLattice // torus: some A(n0) = 0, n0 != 0
  };

  Kind kind = Kind::ContinuousDensity;
  Support support = Support::AllOfSpace;
  std::string support_desc;
  bool evaluable = true;  // false for composite spectra we can describe but not evaluate

  // ContinuousDensity (1-D): psihat(w) >= 0.
  std::function<double(double)> density;
  double cutoff = INF;  // density vanishes for |w| > cutoff (INF if none)
  // Bound on \int_{|w|>W} psihat(w) dw (used for truncation error accounting).
  std::function<double(double)> tail_mass;

  // Lattice (1-D): (location, Lambda-weight), weights > 0.
  std::vector<std::pair<double, double>> atoms;

  // TorusCoefficients: A_psi(n) >= 0, symmetric; tail(N) bounds
  // sum over max_j |n_j| > N of A_psi(n).
  std::function<double(const Eigen::VectorXi&)> coeff;
  std::function<double(int)> coeff_tail;
};

struct Classification {
  enum class Verdict { Characteristic, NotCharacteristic, CharacteristicToP1, Unknown };
  Verdict verdict = Verdict::Unknown;
  std::string reason;
};

std::string to_string(Classification::Verdict v);

class Kernel;
using KernelPtr = std::shared_ptr<const Kernel>;

class Kernel {
 public:
  explicit Kernel(int d) : d_(d) {
    if (d < 1) throw validation_error("kernel dimension must be >= 1");
  }
  virtual ~Kernel() = default;

  int dim() const { return d_; }

  // k(x,y); throws validation_error on dimension mismatch.
  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  // 1-D convenience.
  double operator()(double x, double y) const;

  virtual bool translation_invariant() const = 0;
  virtual bool on_torus() const { return false; }
  // psi(delta) for translation-invariant families; others throw.
  virtual double psi(const Eigen::VectorXd& delta) const;
  // sup_x k(x,x); nullopt if unbounded.
  virtual std::optional<double> bound() const = 0;
  // Bochner spectrum; throws unsupported_error when not translation invariant
  // (and, for families whose spectrum we only carry in 1-D, when d > 1).
  virtual SpectrumInfo spectrum() const;
  virtual Classification classify() const = 0;
  virtual std::string describe() const = 0;
  // Non-empty for sum kernels: gamma^2 is additive in k, so callers may
  // recurse when the combined spectrum is not directly evaluable.
  virtual std::vector<KernelPtr> summands() const { return {}; }

 protected:
  virtual double eval_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const = 0;
  int d_;
};

// ---- factories (translation-invariant families on R^d; Table-like zoo) ----

KernelPtr make_trivial(double c, int d = 1);                 // k = C
KernelPtr make_dot_product(int d = 1);                       // k = x.y
KernelPtr make_poly2(int d = 1);                             // k = (1+x.y)^2
KernelPtr make_gaussian(double sigma, int d = 1);            // exp(-|x-y|^2/(2s^2))
KernelPtr make_laplacian(double sigma, int d = 1);           // exp(-s*sum|x_j-y_j|)
KernelPtr make_inverse_multiquadric(double sigma, double c, int d = 1);
KernelPtr make_matern(double nu, double sigma, int d = 1);
KernelPtr make_bspline(int order, int d = 1);                // odd order 2n+1
KernelPtr make_sinc(double sigma, int d = 1);                // sin(s u)/u
KernelPtr make_exp_dot(double sigma, int d = 1, bool compact_domain = false);
KernelPtr make_cosine(double sigma, int d = 1);              // cos(s u)
KernelPtr make_poisson_r(double sigma, int d = 1);           // periodic on R, 0<s<1
KernelPtr make_dirichlet_r(int l, double tau = TWO_PI, int d = 1);
KernelPtr make_fejer_r(int l, int d = 1);                    // period 2pi
KernelPtr make_sum(KernelPtr a, KernelPtr b);
KernelPtr make_product(KernelPtr a, KernelPtr b);
KernelPtr make_scaled(double c, KernelPtr k);                // c*k, c > 0
KernelPtr make_from_metric(std::function<double(double, double)> rho,
                           double basepoint, int d = 1);

// ---- kernels on the torus T^d (points reduced mod 2pi) ----

struct TorusKernelSpec {
  enum class Family { Poisson, Dirichlet, Fejer, Cosine, Explicit };
  Family family = Family::Poisson;
  double sigma = 0.5;  // Poisson (0<sigma<1) / Cosine (positive integer)
  int n = 1;           // Dirichlet / Fejer order
  // Explicit coefficients: A(n) for n >= 0 (symmetric extension), with tail bound.
  std::function<double(int)> explicit_coeff;
  std::function<double(int)> explicit_tail;
  bool explicit_all_positive = false;
};

class TorusKernel : public Kernel {
 public:
  TorusKernel(TorusKernelSpec spec, int d);
  bool translation_invariant() const override { return true; }
  bool on_torus() const override { return true; }
  std::optional<double> bound() const override;
  SpectrumInfo spectrum() const override;
  Classification classify() const override;
  std::string describe() const override;
  // 1-D coefficient A_psi(n); d-dim coefficient is the product over components.
  double coeff1(int n) const;
  double coeff(const Eigen::VectorXi& n) const;
  double tail(int N) const;  // bound on sum over max_j|n_j| > N
  const TorusKernelSpec& torus_spec() const { return spec_; }

 protected:
  double eval_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const override;

 private:
  double psi1(double x) const;  // 1-D periodic psi
  TorusKernelSpec spec_;
};

KernelPtr make_torus(TorusKernelSpec spec, int d = 1);

// ---- metric helpers ----

// rho~(x,y) = ||k(.,x)-k(.,y)||_H = sqrt(k(x,x)+k(y,y)-2k(x,y)).
// Radicands in [-1e-12, 0) clamp to 0; below that throws numerical_error.
double hilbertian_distance(const Kernel& k, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y);
double hilbertian_distance(const Kernel& k, double x, double y);

}  // namespace kdist
