#include "kdist/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kdist/quadrature.hpp"

namespace kdist {

std::string to_string(Classification::Verdict v) {
  switch (v) {
    case Classification::Verdict::Characteristic: return "Characteristic";
    case Classification::Verdict::NotCharacteristic: return "NotCharacteristic";
    case Classification::Verdict::CharacteristicToP1: return "CharacteristicToP1";
    default: return "Unknown";
  }
}

double Kernel::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (x.size() != d_ || y.size() != d_)
    throw validation_error("kernel eval: point dimension mismatch");
  return eval_impl(x, y);
}

double Kernel::operator()(double x, double y) const {
  if (d_ != 1) throw validation_error("scalar eval on d>1 kernel");
  Eigen::VectorXd vx(1), vy(1);
  vx << x;
  vy << y;
  return eval_impl(vx, vy);
}

double Kernel::psi(const Eigen::VectorXd& delta) const {
  if (!translation_invariant())
    throw unsupported_error("psi: kernel is not translation invariant");
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(d_);
  return eval_impl(delta, zero);
}

SpectrumInfo Kernel::spectrum() const {
  throw unsupported_error("spectrum unavailable for " + describe());
}

namespace {

using V = Eigen::VectorXd;
using Verdict = Classification::Verdict;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------- trivial

class TrivialKernel final : public Kernel {
 public:
  TrivialKernel(double c, int d) : Kernel(d), c_(c) {
    if (c < 0) throw validation_error("trivial kernel needs C >= 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return c_; }
  SpectrumInfo spectrum() const override {
    SpectrumInfo s;
    s.kind = SpectrumInfo::Kind::Lattice;
    s.support = SpectrumInfo::Support::LatticeSet;
    s.support_desc = "{0}";
    if (c_ > 0) s.atoms = {{0.0, c_}};
    return s;
  }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "spectrum is a single atom at 0; constant feature map cannot "
            "separate measures"};
  }
  std::string describe() const override { return "trivial(" + fmt(c_) + ")"; }

 protected:
  double eval_impl(const V&, const V&) const override { return c_; }

 private:
  double c_;
};

// ----------------------------------------------------------- dot products

class DotProductKernel final : public Kernel {
 public:
  explicit DotProductKernel(int d) : Kernel(d) {}
  bool translation_invariant() const override { return false; }
  std::optional<double> bound() const override { return std::nullopt; }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "gamma = 0 iff the means match; measures with equal means are "
            "not separated"};
  }
  std::string describe() const override { return "dotproduct"; }

 protected:
  double eval_impl(const V& x, const V& y) const override { return x.dot(y); }
};

class Poly2Kernel final : public Kernel {
 public:
  explicit Poly2Kernel(int d) : Kernel(d) {}
  bool translation_invariant() const override { return false; }
  std::optional<double> bound() const override { return std::nullopt; }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "gamma depends only on the first two moments; measures sharing "
            "mean and covariance are not separated"};
  }
  std::string describe() const override { return "poly2"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    const double t = 1.0 + x.dot(y);
    return t * t;
  }
};

class ExpDotKernel final : public Kernel {
 public:
  ExpDotKernel(double sigma, int d, bool compact) : Kernel(d), s_(sigma), compact_(compact) {
    if (sigma <= 0) throw validation_error("expdot needs sigma > 0");
  }
  bool translation_invariant() const override { return false; }
  std::optional<double> bound() const override { return std::nullopt; }
  Classification classify() const override {
    if (compact_)
      return {Verdict::CharacteristicToP1,
              "universal on the declared compact domain, hence separates "
              "measures supported there"};
    return {Verdict::Unknown,
            "exp(sigma x.y) is only known to be characteristic on compact "
            "domains; no verdict without a compact-domain flag"};
  }
  std::string describe() const override {
    return "expdot(" + fmt(s_) + (compact_ ? ",compact" : "") + ")";
  }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    return std::exp(s_ * x.dot(y));
  }

 private:
  double s_;
  bool compact_;
};

// ------------------------------------------------- continuous-spectrum zoo

class GaussianKernel final : public Kernel {
 public:
  GaussianKernel(double sigma, int d) : Kernel(d), s_(sigma) {
    if (sigma <= 0) throw validation_error("gaussian needs sigma > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return 1.0; }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.support_desc = "R";
    const double s = s_;
    sp.density = [s](double w) { return s * std::exp(-0.5 * s * s * w * w); };
    sp.tail_mass = [s](double W) {
      return 2.0 * std::sqrt(PI / 2.0) * std::erfc(s * W / std::sqrt(2.0));
    };
    return sp;
  }
  Classification classify() const override {
    return {Verdict::Characteristic, "spectral density positive on all of R^d"};
  }
  std::string describe() const override { return "gaussian(" + fmt(s_) + ")"; }
  double sigma() const { return s_; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    return std::exp(-(x - y).squaredNorm() / (2.0 * s_ * s_));
  }

 private:
  double s_;
};

class LaplacianKernel final : public Kernel {
 public:
  LaplacianKernel(double sigma, int d) : Kernel(d), s_(sigma) {
    if (sigma <= 0) throw validation_error("laplacian needs sigma > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return 1.0; }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.support_desc = "R";
    const double s = s_;
    sp.density = [s](double w) {
      return std::sqrt(2.0 / PI) * s / (s * s + w * w);
    };
    sp.tail_mass = [s](double W) {
      return 2.0 * std::sqrt(2.0 / PI) * (PI / 2.0 - std::atan(W / s));
    };
    return sp;
  }
  Classification classify() const override {
    return {Verdict::Characteristic, "spectral density positive on all of R^d"};
  }
  std::string describe() const override { return "laplacian(" + fmt(s_) + ")"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    return std::exp(-s_ * (x - y).lpNorm<1>());
  }

 private:
  double s_;
};

class InverseMultiquadricKernel final : public Kernel {
 public:
  InverseMultiquadricKernel(double sigma, double c, int d) : Kernel(d), s_(sigma), c_(c) {
    if (sigma <= 0 || c <= 0) throw validation_error("imq needs sigma > 0, c > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return std::pow(s_, -2.0 * c_); }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.support_desc = "R";
    const double s = s_, c = c_;
    auto dens = [s, c](double w) {
      w = std::abs(w);
      if (w < 1e-12) {
        if (c <= 0.5) w = 1e-12;  // integrable singularity at 0
        else
          return std::pow(s, 1.0 - 2.0 * c) / SQRT_TWO_PI * std::sqrt(PI) *
                 std::tgamma(c - 0.5) / std::tgamma(c);
      }
      const double z = s * w;
      if (z > 650.0) return 0.0;
      return std::pow(s, 1.0 - 2.0 * c) / SQRT_TWO_PI * (2.0 * std::sqrt(PI) / std::tgamma(c)) *
             std::pow(0.5 * z, c - 0.5) * std::cyl_bessel_k(c - 0.5, z);
    };
    sp.density = dens;
    sp.tail_mass = [dens, s](double W) {
      // exponentially decaying tail; integrate the remaining visible range
      QuadResult q = integrate(dens, W, W + 700.0 / s, 1e-14);
      return 2.0 * (q.value + q.err);
    };
    return sp;
  }
  Classification classify() const override {
    return {Verdict::Characteristic, "spectral density positive on all of R^d"};
  }
  std::string describe() const override {
    return "imq(" + fmt(s_) + "," + fmt(c_) + ")";
  }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    return std::pow(s_ * s_ + (x - y).squaredNorm(), -c_);
  }

 private:
  double s_, c_;
};

class MaternKernel final : public Kernel {
 public:
  MaternKernel(double nu, double sigma, int d) : Kernel(d), nu_(nu), s_(sigma) {
    if (nu <= 0 || sigma <= 0) throw validation_error("matern needs nu > 0, sigma > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return 1.0; }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.support_desc = "R";
    const double a = std::sqrt(2.0 * nu_) / s_;
    const double nu = nu_;
    const double K = std::sqrt(2.0) * std::tgamma(nu + 0.5) / std::tgamma(nu) *
                     std::pow(a, 2.0 * nu);
    sp.density = [K, a, nu](double w) {
      return K * std::pow(a * a + w * w, -(nu + 0.5));
    };
    sp.tail_mass = [K, nu](double W) {
      return 2.0 * K * std::pow(W, -2.0 * nu) / (2.0 * nu);
    };
    return sp;
  }
  Classification classify() const override {
    return {Verdict::Characteristic, "spectral density positive on all of R^d"};
  }
  std::string describe() const override {
    return "matern(" + fmt(nu_) + "," + fmt(s_) + ")";
  }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    const double r = (x - y).norm();
    if (r < 1e-300) return 1.0;
    const double z = std::sqrt(2.0 * nu_) * r / s_;
    if (nu_ == 0.5) return std::exp(-z);  // exponential kernel shortcut
    if (z > 650.0) return 0.0;
    return std::pow(2.0, 1.0 - nu_) / std::tgamma(nu_) * std::pow(z, nu_) *
           std::cyl_bessel_k(nu_, z);
  }

 private:
  double nu_, s_;
};

// ------------------------------------------------------------- B-splines

// B-spline of odd order 2n+1 = (2n+2)-fold convolution of the unit box,
// supported on [-(n+1), n+1]. Order 1 (the triangle) is closed-form; higher
// orders are built once by repeated numerical convolution (cumulative
// trapezoid of the running function against the box) and evaluated by cubic
// interpolation on the cached grid.
class BSplineKernel final : public Kernel {
 public:
  BSplineKernel(int order, int d) : Kernel(d), order_(order) {
    if (order < 1 || order % 2 == 0)
      throw validation_error("bspline order must be odd (2n+1)");
    n_ = (order - 1) / 2;
    if (n_ > 0) build_table();
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return std::pow(psi1(0.0), d_); }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.support_desc = "R (zeros on the lattice 2 pi Z \\ {0})";
    const int m = 2 * n_ + 2;  // number of box factors
    sp.density = [m](double w) {
      // 4^{m/2} sin^m(w/2) / (sqrt(2pi) w^m) = sinc-like(w/2)^m / sqrt(2pi)
      const double hw = 0.5 * std::abs(w);
      const double base = hw < 1e-6 ? 1.0 - hw * hw / 6.0 : std::sin(hw) / hw;
      return std::pow(base * base, m / 2) / SQRT_TWO_PI;
    };
    sp.tail_mass = [m](double W) {
      // |sin|<=1: psihat <= 4^{m/2}/(sqrt(2pi) w^m)
      return 2.0 * std::pow(2.0, m) / (SQRT_TWO_PI * (m - 1) * std::pow(W, m - 1));
    };
    return sp;
  }
  Classification classify() const override {
    return {Verdict::Characteristic,
            "psi has compact support, so the spectrum has full support "
            "(its zeros form a null set)"};
  }
  std::string describe() const override { return "bspline(" + fmt(order_) + ")"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    double v = 1.0;
    for (int j = 0; j < d_; ++j) v *= psi1(x[j] - y[j]);
    return v;
  }

 private:
  double psi1(double t) const {
    t = std::abs(t);
    if (n_ == 0) return t >= 1.0 ? 0.0 : 1.0 - t;
    const double half = n_ + 1.0;
    if (t >= half) return 0.0;
    // cubic (4-point Lagrange) interpolation on the cached half-line grid
    const double u = t / dx_;
    int i = static_cast<int>(u);
    const int last = static_cast<int>(table_.size()) - 1;
    i = std::clamp(i, 1, last - 2);
    const double s = u - i;
    const double f0 = table_[i - 1], f1 = table_[i], f2 = table_[i + 1], f3 = table_[i + 2];
    return f1 + s * (0.5 * (f2 - f0) +
                     s * (f0 - 2.5 * f1 + 2.0 * f2 - 0.5 * f3 +
                          s * (0.5 * (f3 - f0) + 1.5 * (f1 - f2))));
  }

  void build_table() {
    // Start from the closed-form triangle (2 boxes) on a symmetric grid and
    // convolve with the unit box 2 n_ more times, for 2 n_ + 2 box factors in
    // total (an autocorrelation, so the transform sinc^{2n+2} stays
    // nonnegative): g_{k+1}(x) = \int_{x-1/2}^{x+1/2} g_k, from the
    // cumulative trapezoid.
    const int per_unit = 4096;
    const double hi = n_ + 1.0;
    const int half_pts = static_cast<int>(hi * per_unit);
    dx_ = 1.0 / per_unit;
    // full symmetric grid [-hi, hi]
    const int npts = 2 * half_pts + 1;
    std::vector<double> g(npts);
    for (int i = 0; i < npts; ++i) {
      const double x = -hi + i * dx_;
      g[i] = std::abs(x) >= 1.0 ? 0.0 : 1.0 - std::abs(x);
    }
    std::vector<double> cum(npts);
    const int half_w = per_unit / 2;  // box half-width in grid steps
    for (int pass = 0; pass < 2 * n_; ++pass) {
      cum[0] = 0.0;
      for (int i = 1; i < npts; ++i)
        cum[i] = cum[i - 1] + 0.5 * dx_ * (g[i - 1] + g[i]);
      std::vector<double> h(npts, 0.0);
      for (int i = 0; i < npts; ++i) {
        const int a = std::max(0, i - half_w);
        const int b = std::min(npts - 1, i + half_w);
        h[i] = cum[b] - cum[a];
      }
      g.swap(h);
    }
    table_.assign(g.begin() + half_pts, g.end());  // keep [0, hi]
  }

  int order_, n_ = 0;
  double dx_ = 0.0;
  std::vector<double> table_;  // psi on [0, n+1] when n_ > 0
};

class SincKernel final : public Kernel {
 public:
  SincKernel(double sigma, int d) : Kernel(d), s_(sigma) {
    if (sigma <= 0) throw validation_error("sinc needs sigma > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return std::pow(s_, d_); }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.support = SpectrumInfo::Support::CompactSet;
    sp.support_desc = "[-" + fmt(s_) + "," + fmt(s_) + "]";
    const double s = s_;
    sp.density = [s](double w) {
      return std::abs(w) <= s ? std::sqrt(PI / 2.0) : 0.0;
    };
    sp.cutoff = s_;
    sp.tail_mass = [s](double W) {
      return W >= s ? 0.0 : 2.0 * std::sqrt(PI / 2.0) * (s - W);
    };
    return sp;
  }
  Classification classify() const override {
    return {Verdict::CharacteristicToP1,
            "spectrum is a proper subset of R with nonempty interior; "
            "separates measures whose characteristic functions are "
            "determined there, not all of P"};
  }
  std::string describe() const override { return "sinc(" + fmt(s_) + ")"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    double v = 1.0;
    for (int j = 0; j < d_; ++j) {
      const double t = x[j] - y[j];
      if (std::abs(t) < 1e-6) {
        const double st = s_ * t;
        v *= s_ * (1.0 - st * st / 6.0);
      } else {
        v *= std::sin(s_ * t) / t;
      }
    }
    return v;
  }

 private:
  double s_;
};

// ----------------------------------------------- lattice-spectrum kernels

class CosineKernel final : public Kernel {
 public:
  CosineKernel(double sigma, int d) : Kernel(d), s_(sigma) {
    if (sigma <= 0) throw validation_error("cosine needs sigma > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return 1.0; }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.kind = SpectrumInfo::Kind::Lattice;
    sp.support = SpectrumInfo::Support::LatticeSet;
    sp.support_desc = "{-" + fmt(s_) + "," + fmt(s_) + "}";
    sp.atoms = {{-s_, 0.5}, {s_, 0.5}};
    return sp;
  }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "two-atom spectrum has empty interior"};
  }
  std::string describe() const override { return "cosine(" + fmt(s_) + ")"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    double v = 1.0;
    for (int j = 0; j < d_; ++j) v *= std::cos(s_ * (x[j] - y[j]));
    return v;
  }

 private:
  double s_;
};

class PoissonRKernel final : public Kernel {
 public:
  PoissonRKernel(double sigma, int d) : Kernel(d), s_(sigma) {
    if (sigma <= 0 || sigma >= 1) throw validation_error("poisson needs 0 < sigma < 1");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override {
    return std::pow((1.0 + s_) / (1.0 - s_), d_);
  }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.kind = SpectrumInfo::Kind::Lattice;
    sp.support = SpectrumInfo::Support::LatticeSet;
    sp.support_desc = "Z";
    const int J = std::max(8, static_cast<int>(std::ceil(-40.0 / std::log(s_))));
    for (int j = -J; j <= J; ++j) sp.atoms.push_back({double(j), std::pow(s_, std::abs(j))});
    return sp;
  }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "spectrum supported on the integer lattice (empty interior in R)"};
  }
  std::string describe() const override { return "poisson(" + fmt(s_) + ")"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    double v = 1.0;
    for (int j = 0; j < d_; ++j) {
      const double t = x[j] - y[j];
      v *= (1.0 - s_ * s_) / (s_ * s_ - 2.0 * s_ * std::cos(t) + 1.0);
    }
    return v;
  }

 private:
  double s_;
};

class DirichletRKernel final : public Kernel {
 public:
  DirichletRKernel(int l, double tau, int d) : Kernel(d), l_(l), tau_(tau) {
    if (l < 1 || tau <= 0) throw validation_error("dirichlet needs l >= 1, tau > 0");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return std::pow(2.0 * l_ + 1.0, d_); }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.kind = SpectrumInfo::Kind::Lattice;
    sp.support = SpectrumInfo::Support::LatticeSet;
    sp.support_desc = "{2 pi j / tau : |j| <= " + fmt(l_) + "}";
    for (int j = -l_; j <= l_; ++j) sp.atoms.push_back({TWO_PI * j / tau_, 1.0});
    return sp;
  }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "finite lattice spectrum (empty interior in R)"};
  }
  std::string describe() const override {
    return "dirichlet(l=" + fmt(l_) + ",tau=" + fmt(tau_) + ")";
  }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    double v = 1.0;
    for (int j = 0; j < d_; ++j) {
      const double t = PI * (x[j] - y[j]) / tau_;
      const double s = std::sin(t);
      v *= std::abs(s) < 1e-10 ? 2.0 * l_ + 1.0 : std::sin((2.0 * l_ + 1.0) * t) / s;
    }
    return v;
  }

 private:
  int l_;
  double tau_;
};

class FejerRKernel final : public Kernel {
 public:
  FejerRKernel(int l, int d) : Kernel(d), l_(l) {
    if (l < 1) throw validation_error("fejer needs l >= 1");
  }
  bool translation_invariant() const override { return true; }
  std::optional<double> bound() const override { return std::pow(l_ + 1.0, d_); }
  SpectrumInfo spectrum() const override {
    if (d_ != 1) throw unsupported_error("spectrum: implemented for d=1");
    SpectrumInfo sp;
    sp.kind = SpectrumInfo::Kind::Lattice;
    sp.support = SpectrumInfo::Support::LatticeSet;
    sp.support_desc = "{j in Z : |j| <= " + fmt(l_) + "}";
    for (int j = -l_; j <= l_; ++j)
      sp.atoms.push_back({double(j), 1.0 - std::abs(j) / (l_ + 1.0)});
    return sp;
  }
  Classification classify() const override {
    return {Verdict::NotCharacteristic,
            "finite lattice spectrum (empty interior in R)"};
  }
  std::string describe() const override { return "fejer(" + fmt(l_) + ")"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    double v = 1.0;
    for (int j = 0; j < d_; ++j) {
      const double h = 0.5 * (x[j] - y[j]);
      const double s = std::sin(h);
      if (std::abs(s) < 1e-10) {
        v *= l_ + 1.0;
      } else {
        const double t = std::sin((l_ + 1.0) * h) / s;
        v *= t * t / (l_ + 1.0);
      }
    }
    return v;
  }

 private:
  int l_;
};

// ------------------------------------------------------------ composites

SpectrumInfo::Support compose_sum_support(SpectrumInfo::Support a, SpectrumInfo::Support b) {
  using S = SpectrumInfo::Support;
  if (a == S::AllOfSpace || b == S::AllOfSpace) return S::AllOfSpace;
  if (a == S::CompactSet || b == S::CompactSet) return S::CompactSet;
  return S::LatticeSet;
}

class SumKernel final : public Kernel {
 public:
  SumKernel(KernelPtr a, KernelPtr b) : Kernel(a->dim()), a_(std::move(a)), b_(std::move(b)) {
    if (a_->dim() != b_->dim()) throw validation_error("sum: dimension mismatch");
  }
  bool translation_invariant() const override {
    return a_->translation_invariant() && b_->translation_invariant();
  }
  std::vector<KernelPtr> summands() const override { return {a_, b_}; }
  std::optional<double> bound() const override {
    auto ba = a_->bound(), bb = b_->bound();
    if (ba && bb) return *ba + *bb;
    return std::nullopt;
  }
  SpectrumInfo spectrum() const override {
    SpectrumInfo sa = a_->spectrum(), sb = b_->spectrum();
    SpectrumInfo sp;
    sp.support = compose_sum_support(sa.support, sb.support);
    sp.support_desc = "union(" + sa.support_desc + ", " + sb.support_desc + ")";
    if (sa.kind == SpectrumInfo::Kind::Lattice && sb.kind == SpectrumInfo::Kind::Lattice) {
      sp.kind = SpectrumInfo::Kind::Lattice;
      sp.atoms = sa.atoms;
      for (auto& at : sb.atoms) {
        bool merged = false;
        for (auto& ex : sp.atoms)
          if (std::abs(ex.first - at.first) < 1e-12) {
            ex.second += at.second;
            merged = true;
            break;
          }
        if (!merged) sp.atoms.push_back(at);
      }
    } else if (sa.kind == SpectrumInfo::Kind::ContinuousDensity &&
               sb.kind == SpectrumInfo::Kind::ContinuousDensity) {
      auto da = sa.density, db = sb.density;
      sp.density = [da, db](double w) { return da(w) + db(w); };
      sp.cutoff = std::max(sa.cutoff, sb.cutoff);
      auto ta = sa.tail_mass, tb = sb.tail_mass;
      sp.tail_mass = [ta, tb](double W) { return ta(W) + tb(W); };
    } else {
      sp.evaluable = false;  // mixed atomic/continuous sum: describable only
    }
    return sp;
  }
  Classification classify() const override {
    auto ca = a_->classify(), cb = b_->classify();
    if (ca.verdict == Verdict::Characteristic || cb.verdict == Verdict::Characteristic)
      return {Verdict::Characteristic,
              "sum with a characteristic summand: spectral support contains R^d"};
    if (!translation_invariant()) return {Verdict::Unknown, "composite without spectrum"};
    try {
      SpectrumInfo sp = spectrum();
      if (sp.support == SpectrumInfo::Support::AllOfSpace)
        return {Verdict::Characteristic, "combined spectral support is R^d"};
      if (sp.support == SpectrumInfo::Support::CompactSet)
        return {Verdict::CharacteristicToP1,
                "combined support has nonempty interior but is a proper subset"};
      return {Verdict::NotCharacteristic, "combined support has empty interior"};
    } catch (const unsupported_error&) {
      return {Verdict::Unknown, "no derivable spectrum for the summands"};
    }
  }
  std::string describe() const override {
    return "sum(" + a_->describe() + "," + b_->describe() + ")";
  }
  const KernelPtr& left() const { return a_; }
  const KernelPtr& right() const { return b_; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    return a_->eval(x, y) + b_->eval(x, y);
  }

 private:
  KernelPtr a_, b_;
};

class ProductKernel final : public Kernel {
 public:
  ProductKernel(KernelPtr a, KernelPtr b) : Kernel(a->dim()), a_(std::move(a)), b_(std::move(b)) {
    if (a_->dim() != b_->dim()) throw validation_error("product: dimension mismatch");
  }
  bool translation_invariant() const override {
    return a_->translation_invariant() && b_->translation_invariant();
  }
  std::optional<double> bound() const override {
    auto ba = a_->bound(), bb = b_->bound();
    if (ba && bb) return (*ba) * (*bb);
    return std::nullopt;
  }
  SpectrumInfo spectrum() const override {
    SpectrumInfo sa = a_->spectrum(), sb = b_->spectrum();
    SpectrumInfo sp;
    // spectrum of a product is the convolution Lambda_a * Lambda_b
    using S = SpectrumInfo::Support;
    const bool za = is_zero(sa), zb = is_zero(sb);
    if (za || zb) {
      sp.kind = SpectrumInfo::Kind::Lattice;
      sp.support = S::LatticeSet;
      sp.support_desc = "{} (zero kernel)";
      return sp;
    }
    if (sa.support == S::AllOfSpace || sb.support == S::AllOfSpace)
      sp.support = S::AllOfSpace;
    else if (sa.support == S::CompactSet || sb.support == S::CompactSet)
      sp.support = S::CompactSet;
    else
      sp.support = S::LatticeSet;
    sp.support_desc = "minkowski(" + sa.support_desc + ", " + sb.support_desc + ")";
    // constant factor (single atom at 0): convolution is a rescaling
    auto const_weight = [](const SpectrumInfo& s) -> double {
      if (s.kind == SpectrumInfo::Kind::Lattice && s.atoms.size() == 1 &&
          std::abs(s.atoms.front().first) < 1e-300)
        return s.atoms.front().second;
      return 0.0;
    };
    if (const double c = const_weight(sa); c > 0.0) {
      sp = sb;
      if (sp.kind == SpectrumInfo::Kind::ContinuousDensity && sp.evaluable) {
        auto dens = sb.density;
        auto tail = sb.tail_mass;
        sp.density = [dens, c](double w) { return c * dens(w); };
        if (tail) sp.tail_mass = [tail, c](double W) { return c * tail(W); };
      } else {
        for (auto& at : sp.atoms) at.second *= c;
      }
      return sp;
    }
    if (const double c = const_weight(sb); c > 0.0) {
      sp = sa;
      if (sp.kind == SpectrumInfo::Kind::ContinuousDensity && sp.evaluable) {
        auto dens = sa.density;
        auto tail = sa.tail_mass;
        sp.density = [dens, c](double w) { return c * dens(w); };
        if (tail) sp.tail_mass = [tail, c](double W) { return c * tail(W); };
      } else {
        for (auto& at : sp.atoms) at.second *= c;
      }
      return sp;
    }
    if (sa.kind == SpectrumInfo::Kind::Lattice && sb.kind == SpectrumInfo::Kind::Lattice) {
      sp.kind = SpectrumInfo::Kind::Lattice;
      for (auto& p : sa.atoms)
        for (auto& q : sb.atoms) {
          const double loc = p.first + q.first, w = p.second * q.second;
          bool merged = false;
          for (auto& ex : sp.atoms)
            if (std::abs(ex.first - loc) < 1e-12) {
              ex.second += w;
              merged = true;
              break;
            }
          if (!merged) sp.atoms.push_back({loc, w});
        }
    } else {
      sp.evaluable = false;  // convolution of densities: describable only
    }
    return sp;
  }
  Classification classify() const override {
    auto ca = a_->classify(), cb = b_->classify();
    const bool a_char = ca.verdict == Verdict::Characteristic;
    const bool b_char = cb.verdict == Verdict::Characteristic;
    if ((a_char && !kernel_is_zero(*b_)) || (b_char && !kernel_is_zero(*a_)))
      return {Verdict::Characteristic,
              "product with a characteristic factor and a nonzero factor: "
              "convolved spectral support is R^d"};
    if (!translation_invariant()) return {Verdict::Unknown, "composite without spectrum"};
    try {
      SpectrumInfo sp = spectrum();
      if (sp.support == SpectrumInfo::Support::AllOfSpace)
        return {Verdict::Characteristic, "convolved spectral support is R^d"};
      if (sp.support == SpectrumInfo::Support::CompactSet)
        return {Verdict::CharacteristicToP1,
                "convolved support has nonempty interior but is a proper subset"};
      return {Verdict::NotCharacteristic, "convolved support has empty interior"};
    } catch (const unsupported_error&) {
      return {Verdict::Unknown, "no derivable spectrum for the factors"};
    }
  }
  std::string describe() const override {
    return "product(" + a_->describe() + "," + b_->describe() + ")";
  }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    return a_->eval(x, y) * b_->eval(x, y);
  }

 private:
  static bool is_zero(const SpectrumInfo& s) {
    if (s.kind != SpectrumInfo::Kind::Lattice) return false;
    double total = 0.0;
    for (auto& a : s.atoms) total += a.second;
    return total == 0.0;
  }
  static bool kernel_is_zero(const Kernel& k) {
    if (!k.translation_invariant()) return false;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(k.dim());
    return k.eval(z, z) == 0.0;
  }
  KernelPtr a_, b_;
};

class FromMetricKernel final : public Kernel {
 public:
  FromMetricKernel(std::function<double(double, double)> rho, double x0, int d)
      : Kernel(d), rho_(std::move(rho)), x0_(x0) {
    if (d != 1) throw validation_error("from_metric: implemented for d=1");
  }
  bool translation_invariant() const override { return false; }
  std::optional<double> bound() const override { return std::nullopt; }
  Classification classify() const override {
    return {Verdict::Unknown, "kernel induced from a metric; no spectrum available"};
  }
  std::string describe() const override { return "from_metric"; }

 protected:
  double eval_impl(const V& x, const V& y) const override {
    const double a = rho_(x[0], x0_), b = rho_(y[0], x0_), c = rho_(x[0], y[0]);
    return 0.5 * (a * a + b * b - c * c);
  }

 private:
  std::function<double(double, double)> rho_;
  double x0_;
};

}  // namespace

// -------------------------------------------------------------- factories

KernelPtr make_trivial(double c, int d) { return std::make_shared<TrivialKernel>(c, d); }
KernelPtr make_dot_product(int d) { return std::make_shared<DotProductKernel>(d); }
KernelPtr make_poly2(int d) { return std::make_shared<Poly2Kernel>(d); }
KernelPtr make_gaussian(double sigma, int d) {
  return std::make_shared<GaussianKernel>(sigma, d);
}
KernelPtr make_laplacian(double sigma, int d) {
  return std::make_shared<LaplacianKernel>(sigma, d);
}
KernelPtr make_inverse_multiquadric(double sigma, double c, int d) {
  return std::make_shared<InverseMultiquadricKernel>(sigma, c, d);
}
KernelPtr make_matern(double nu, double sigma, int d) {
  return std::make_shared<MaternKernel>(nu, sigma, d);
}
KernelPtr make_bspline(int order, int d) { return std::make_shared<BSplineKernel>(order, d); }
KernelPtr make_sinc(double sigma, int d) { return std::make_shared<SincKernel>(sigma, d); }
KernelPtr make_exp_dot(double sigma, int d, bool compact_domain) {
  return std::make_shared<ExpDotKernel>(sigma, d, compact_domain);
}
KernelPtr make_cosine(double sigma, int d) { return std::make_shared<CosineKernel>(sigma, d); }
KernelPtr make_poisson_r(double sigma, int d) {
  return std::make_shared<PoissonRKernel>(sigma, d);
}
KernelPtr make_dirichlet_r(int l, double tau, int d) {
  return std::make_shared<DirichletRKernel>(l, tau, d);
}
KernelPtr make_fejer_r(int l, int d) { return std::make_shared<FejerRKernel>(l, d); }
KernelPtr make_sum(KernelPtr a, KernelPtr b) {
  return std::make_shared<SumKernel>(std::move(a), std::move(b));
}
KernelPtr make_product(KernelPtr a, KernelPtr b) {
  return std::make_shared<ProductKernel>(std::move(a), std::move(b));
}
KernelPtr make_scaled(double c, KernelPtr k) {
  if (c <= 0) throw validation_error("scale factor must be positive");
  const int d = k->dim();
  return make_product(make_trivial(c, d), std::move(k));
}
KernelPtr make_from_metric(std::function<double(double, double)> rho, double basepoint,
                           int d) {
  return std::make_shared<FromMetricKernel>(std::move(rho), basepoint, d);
}

// ------------------------------------------------------------ torus kernels

TorusKernel::TorusKernel(TorusKernelSpec spec, int d) : Kernel(d), spec_(std::move(spec)) {
  switch (spec_.family) {
    case TorusKernelSpec::Family::Poisson:
      if (spec_.sigma <= 0 || spec_.sigma >= 1)
        throw validation_error("torus poisson needs 0 < sigma < 1");
      break;
    case TorusKernelSpec::Family::Dirichlet:
    case TorusKernelSpec::Family::Fejer:
      if (spec_.n < 1) throw validation_error("torus kernel order must be >= 1");
      break;
    case TorusKernelSpec::Family::Cosine:
      if (spec_.sigma < 1 || spec_.sigma != std::floor(spec_.sigma))
        throw validation_error("torus cosine needs a positive integer frequency");
      break;
    case TorusKernelSpec::Family::Explicit:
      if (!spec_.explicit_coeff || !spec_.explicit_tail)
        throw validation_error("explicit torus kernel needs coefficients and tail bound");
      break;
  }
}

double TorusKernel::coeff1(int n) const {
  const int a = std::abs(n);
  switch (spec_.family) {
    case TorusKernelSpec::Family::Poisson:
      return std::pow(spec_.sigma, a);
    case TorusKernelSpec::Family::Dirichlet:
      return a <= spec_.n ? 1.0 : 0.0;
    case TorusKernelSpec::Family::Fejer:
      return a <= spec_.n ? 1.0 - double(a) / (spec_.n + 1.0) : 0.0;
    case TorusKernelSpec::Family::Cosine:
      return a == static_cast<int>(spec_.sigma) ? 0.5 : 0.0;
    case TorusKernelSpec::Family::Explicit:
      return spec_.explicit_coeff(a);
  }
  return 0.0;
}

double TorusKernel::coeff(const Eigen::VectorXi& n) const {
  if (n.size() != d_) throw validation_error("torus coefficient: dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < d_; ++j) v *= coeff1(n[j]);
  return v;
}

double TorusKernel::tail(int N) const {
  // bound on sum over max_j |n_j| > N of prod_j A(n_j):
  // <= d * tail1(N) * total^(d-1), with total = sum_n A(n).
  double tail1 = 0.0, total = 0.0;
  switch (spec_.family) {
    case TorusKernelSpec::Family::Poisson: {
      const double s = spec_.sigma;
      total = (1.0 + s) / (1.0 - s);
      tail1 = 2.0 * std::pow(s, N + 1) / (1.0 - s);
      break;
    }
    case TorusKernelSpec::Family::Dirichlet:
      total = 2.0 * spec_.n + 1.0;
      tail1 = N >= spec_.n ? 0.0 : 2.0 * (spec_.n - N);
      break;
    case TorusKernelSpec::Family::Fejer:
      total = spec_.n + 1.0;
      tail1 = 0.0;
      for (int j = N + 1; j <= spec_.n; ++j) tail1 += 2.0 * coeff1(j);
      break;
    case TorusKernelSpec::Family::Cosine:
      total = 1.0;
      tail1 = N >= static_cast<int>(spec_.sigma) ? 0.0 : 1.0;
      break;
    case TorusKernelSpec::Family::Explicit:
      tail1 = spec_.explicit_tail(N);
      total = spec_.explicit_coeff(0) + 2.0 * spec_.explicit_coeff(1) + tail1 + 10.0;
      break;
  }
  return d_ * tail1 * std::pow(total, d_ - 1);
}

double TorusKernel::psi1(double x) const {
  switch (spec_.family) {
    case TorusKernelSpec::Family::Poisson: {
      const double s = spec_.sigma;
      return (1.0 - s * s) / (s * s - 2.0 * s * std::cos(x) + 1.0);
    }
    case TorusKernelSpec::Family::Dirichlet: {
      const double h = 0.5 * x;
      const double s = std::sin(h);
      return std::abs(s) < 1e-10 ? 2.0 * spec_.n + 1.0
                                 : std::sin((2.0 * spec_.n + 1.0) * h) / s;
    }
    case TorusKernelSpec::Family::Fejer: {
      const double h = 0.5 * x;
      const double s = std::sin(h);
      if (std::abs(s) < 1e-10) return spec_.n + 1.0;
      const double t = std::sin((spec_.n + 1.0) * h) / s;
      return t * t / (spec_.n + 1.0);
    }
    case TorusKernelSpec::Family::Cosine:
      return std::cos(spec_.sigma * x);
    case TorusKernelSpec::Family::Explicit: {
      // series evaluation with declared tail
      double v = spec_.explicit_coeff(0);
      int n = 1;
      while (spec_.explicit_tail(n) > 1e-14 && n < 100000) ++n;
      for (int j = 1; j <= n; ++j) v += 2.0 * spec_.explicit_coeff(j) * std::cos(j * x);
      return v;
    }
  }
  return 0.0;
}

double TorusKernel::eval_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  double v = 1.0;
  for (int j = 0; j < d_; ++j) {
    double t = std::fmod(x[j] - y[j], TWO_PI);
    v *= psi1(t);
  }
  return v;
}

std::optional<double> TorusKernel::bound() const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d_);
  return eval_impl(z, z);
}

SpectrumInfo TorusKernel::spectrum() const {
  SpectrumInfo sp;
  sp.kind = SpectrumInfo::Kind::TorusCoefficients;
  bool all_positive;
  switch (spec_.family) {
    case TorusKernelSpec::Family::Poisson:
      all_positive = true;
      break;
    case TorusKernelSpec::Family::Explicit:
      all_positive = spec_.explicit_all_positive;
      break;
    default:
      all_positive = false;
  }
  sp.support = all_positive ? SpectrumInfo::Support::AllOfIntegerLattice
                            : SpectrumInfo::Support::ProperSubsetOfLattice;
  sp.support_desc = all_positive ? "Z^d" : "proper subset of Z^d";
  sp.coeff = [this](const Eigen::VectorXi& n) { return coeff(n); };
  sp.coeff_tail = [this](int N) { return tail(N); };
  return sp;
}

Classification TorusKernel::classify() const {
  SpectrumInfo sp = spectrum();
  if (sp.support == SpectrumInfo::Support::AllOfIntegerLattice)
    return {Classification::Verdict::Characteristic,
            "all Fourier coefficients positive off zero"};
  if (spec_.family == TorusKernelSpec::Family::Explicit && !spec_.explicit_all_positive) {
    // scan for a vanishing coefficient within the effective range
    for (int n = 1; n <= 10000; ++n) {
      if (spec_.explicit_coeff(n) == 0.0)
        return {Classification::Verdict::NotCharacteristic,
                "coefficient vanishes at n=" + fmt(n)};
      if (spec_.explicit_tail(n) < 1e-300) break;
    }
    return {Classification::Verdict::Unknown,
            "no vanishing coefficient found within the scanned range"};
  }
  return {Classification::Verdict::NotCharacteristic,
          "some Fourier coefficient vanishes off zero"};
}

std::string TorusKernel::describe() const {
  std::string inner;
  switch (spec_.family) {
    case TorusKernelSpec::Family::Poisson: inner = "poisson(" + fmt(spec_.sigma) + ")"; break;
    case TorusKernelSpec::Family::Dirichlet: inner = "dirichlet(" + fmt(spec_.n) + ")"; break;
    case TorusKernelSpec::Family::Fejer: inner = "fejer(" + fmt(spec_.n) + ")"; break;
    case TorusKernelSpec::Family::Cosine: inner = "cosine(" + fmt(spec_.sigma) + ")"; break;
    case TorusKernelSpec::Family::Explicit: inner = "explicit"; break;
  }
  return "torus(" + inner + (d_ > 1 ? ",d=" + fmt(d_) : "") + ")";
}

KernelPtr make_torus(TorusKernelSpec spec, int d) {
  return std::make_shared<TorusKernel>(std::move(spec), d);
}

// --------------------------------------------------------- metric helpers

double hilbertian_distance(const Kernel& k, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
  const double r = k.eval(x, x) + k.eval(y, y) - 2.0 * k.eval(x, y);
  if (r < -1e-12)
    throw numerical_error("hilbertian_distance: negative radicand " + fmt(r));
  return std::sqrt(std::max(r, 0.0));
}

double hilbertian_distance(const Kernel& k, double x, double y) {
  Eigen::VectorXd vx(1), vy(1);
  vx << x;
  vy << y;
  return hilbertian_distance(k, vx, vy);
}

}  // namespace kdist
