#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "kdist/common.hpp"
#include "kdist/quadrature.hpp"

namespace kdist {

struct Sample {
  std::vector<double> points;
  std::uint64_t seed = 0;
  std::string source;
};

class Measure {
 public:
  enum class Kind {
    Discrete,        // finite atoms (points may be d-dimensional)
    Grid,            // 1-D density sampled on a uniform grid, trapezoid mass
    Gaussian,        // N(mu, s^2)
    Cauchy,          // location x0, scale g
    Uniform,         // on [a,b]
    CauchyPower,     // density C_l / (1+x^2)^l
    Perturbed,       // p = q (1 + alpha sin(nu pi x)), q an even base density
    Piecewise,       // piecewise-linear density between knots, 0 outside
    DensityChar,     // density + characteristic function given as closures
    Torus            // density on T^d
  };

  // --- constructors ---
  static Measure discrete(std::vector<Eigen::VectorXd> points, std::vector<double> weights);
  static Measure discrete1(const std::vector<std::pair<double, double>>& atoms);
  static Measure dirac(double x) { return discrete1({{x, 1.0}}); }
  static Measure grid(double x0, double dx, std::vector<double> values);
  static Measure gaussian(double mu, double s);
  static Measure cauchy(double x0, double g);
  static Measure uniform(double a, double b);
  static Measure cauchy_power(int l);
  static Measure perturbed(const Measure& base, double alpha, double nu);
  static Measure piecewise_linear(std::vector<double> knots, std::vector<double> values);
  // density + exact characteristic function supplied by the caller
  // (used by the construction module where closed forms exist);
  // var_bound bounds the total variation of the density (|phi| <= vb/|w| tail).
  static Measure with_char(std::function<double(double)> density,
                           std::function<std::complex<double>(double)> chf,
                           double lo, double hi, double var_bound, std::string name);
  static Measure torus_density(int d, std::function<double(const Eigen::VectorXd&)> density,
                               std::function<std::complex<double>(const Eigen::VectorXi&)> coeff,
                               std::string name);
  static Measure torus_uniform(int d);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  std::string describe() const;

  // total mass within 1e-8 of 1, nonnegativity, distinct atoms; throws
  // validation_error on failure.
  void validate() const;

  bool is_discrete() const { return kind_ == Kind::Discrete; }
  bool has_density1d() const;
  bool has_char() const;
  bool on_torus() const { return kind_ == Kind::Torus; }

  // --- discrete access ---
  const std::vector<Eigen::VectorXd>& atoms() const;
  const std::vector<double>& weights() const;

  // (mu, s) of a Gaussian measure; throws unsupported_error otherwise.
  std::pair<double, double> gaussian_params() const;
  // (x0, g) of a Cauchy measure; throws unsupported_error otherwise.
  std::pair<double, double> cauchy_params() const;

  // --- 1-D density access ---
  double density(double x) const;
  // d-dim density (torus measures; 1-D measures accept a length-1 vector)
  double density(const Eigen::VectorXd& x) const;
  // interval outside which the density is zero or negligible (tails < ~1e-13)
  std::pair<double, double> support() const;
  // bound on the total variation of the density (so |phi(w)| <= vb/|w|)
  double variation_bound() const;
  // quadrature rule (x_i, a_i) with sum a_i f(x_i) ~ \int f dP; n ~ node count.
  Rule quadrature_rule(int n) const;

  // --- probability interface ---
  std::complex<double> char_function(double omega) const;              // 1-D
  std::complex<double> char_function(const Eigen::VectorXd& omega) const;
  double cdf(double x) const;
  Sample sample(int m, std::uint64_t seed) const;

  // --- torus interface ---
  // A_P(n) = (2pi)^{-d} \int e^{-i n.x} dP
  std::complex<double> torus_fourier_coeff(const Eigen::VectorXi& n) const;

 private:
  Measure() = default;

  struct DiscreteRepr {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> weights;
  };
  struct GridRepr {
    double x0, dx;
    std::vector<double> values;
  };
  struct GaussianRepr { double mu, s; };
  struct CauchyRepr { double x0, g; };
  struct UniformRepr { double a, b; };
  struct CauchyPowerRepr {
    int l;
    double norm_c;  // C_l, computed once by quadrature
    std::shared_ptr<const std::vector<double>> cdf_u;  // CDF on tan-grid
  };
  struct PerturbedRepr {
    std::shared_ptr<const Measure> base;
    double alpha, nu;
  };
  struct PiecewiseRepr {
    std::vector<double> x, y;
  };
  struct CharRepr {
    std::function<double(double)> density;
    std::function<std::complex<double>(double)> chf;
    double lo, hi, var_bound;
    std::string name;
  };
  struct TorusRepr {
    std::function<double(const Eigen::VectorXd&)> density;
    std::function<std::complex<double>(const Eigen::VectorXi&)> coeff;
    std::string name;
  };

  using ReprVariant = std::variant<DiscreteRepr, GridRepr, GaussianRepr, CauchyRepr,
                                   UniformRepr, CauchyPowerRepr, PerturbedRepr,
                                   PiecewiseRepr, CharRepr, TorusRepr>;

  Kind kind_ = Kind::Discrete;
  int d_ = 1;
  ReprVariant repr_;

  template <class T> const T& as() const { return std::get<T>(repr_); }
};

}  // namespace kdist
