#include "kdist/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kdist {

// Acklam's rational approximation to the inverse normal CDF, polished with
// one Halley step; good to ~1e-15 on (0,1).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw validation_error("normal_quantile: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  // Halley refinement against the forward CDF
  const double e = normal_cdf(x) - p;
  const double u = e * SQRT_TWO_PI * std::exp(0.5 * x * x);
  x = x - u / (1 + 0.5 * x * u);
  return x;
}

namespace {

constexpr std::complex<double> I_UNIT{0.0, 1.0};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Gauss-Legendre 8-point rule on [-1,1] (segment integrals of near-constant
// phase in the piecewise characteristic function).
constexpr double GL8_X[4] = {0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975363};
constexpr double GL8_W[4] = {0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

std::complex<double> segment_char(double a, double b, double ya, double yb, double w) {
  // \int_a^b (linear density) e^{iwx} dx
  if (b <= a) return 0.0;
  const double m = (yb - ya) / (b - a);
  if (std::abs(w) * (b - a) < 0.5) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::complex<double> acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double xm = c - h * GL8_X[i], xp = c + h * GL8_X[i];
      acc += GL8_W[i] * ((ya + m * (xm - a)) * std::exp(I_UNIT * w * xm) +
                         (ya + m * (xp - a)) * std::exp(I_UNIT * w * xp));
    }
    return acc * h;
  }
  // antiderivative e^{iwx}(A + Bx) with iwB = m, iwA + B = ya - m a
  const std::complex<double> B = m / (I_UNIT * w);
  const std::complex<double> A = (ya - m * a - B) / (I_UNIT * w);
  return std::exp(I_UNIT * w * b) * (A + B * b) - std::exp(I_UNIT * w * a) * (A + B * a);
}

}  // namespace

// ------------------------------------------------------------ constructors

Measure Measure::discrete(std::vector<Eigen::VectorXd> points, std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size())
    throw validation_error("discrete measure: points/weights size mismatch");
  Measure m;
  m.kind_ = Kind::Discrete;
  m.d_ = static_cast<int>(points.front().size());
  for (auto& p : points)
    if (p.size() != m.d_) throw validation_error("discrete measure: mixed dimensions");
  m.repr_ = DiscreteRepr{std::move(points), std::move(weights)};
  m.validate();
  return m;
}

Measure Measure::discrete1(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> w;
  for (auto& [x, p] : atoms) {
    Eigen::VectorXd v(1);
    v << x;
    pts.push_back(v);
    w.push_back(p);
  }
  return discrete(std::move(pts), std::move(w));
}

Measure Measure::grid(double x0, double dx, std::vector<double> values) {
  if (values.size() < 2 || dx <= 0) throw validation_error("grid measure: bad grid");
  Measure m;
  m.kind_ = Kind::Grid;
  m.repr_ = GridRepr{x0, dx, std::move(values)};
  m.validate();
  return m;
}

Measure Measure::gaussian(double mu, double s) {
  if (s <= 0) throw validation_error("gaussian measure needs s > 0");
  Measure m;
  m.kind_ = Kind::Gaussian;
  m.repr_ = GaussianRepr{mu, s};
  return m;
}

Measure Measure::cauchy(double x0, double g) {
  if (g <= 0) throw validation_error("cauchy measure needs scale > 0");
  Measure m;
  m.kind_ = Kind::Cauchy;
  m.repr_ = CauchyRepr{x0, g};
  return m;
}

Measure Measure::uniform(double a, double b) {
  if (!(a < b)) throw validation_error("uniform measure needs a < b");
  Measure m;
  m.kind_ = Kind::Uniform;
  m.repr_ = UniformRepr{a, b};
  return m;
}

Measure Measure::cauchy_power(int l) {
  if (l < 1) throw validation_error("cauchy_power needs l >= 1");
  // normalizer: 1 / \int (1+x^2)^{-l} dx = 1 / \int cos^{2l-2}(u) du
  QuadResult in = integrate(
      [l](double u) { return std::pow(std::cos(u), 2 * l - 2); }, -PI / 2, PI / 2, 1e-13);
  const double c = 1.0 / in.value;
  // cumulative CDF in the u = atan(x) variable on a fine grid
  const int n = 1 << 13;
  auto cdf_u = std::make_shared<std::vector<double>>(n + 1, 0.0);
  const double du = PI / n;
  double acc = 0.0;
  double prev = 0.0;  // cos^{2l-2}(-pi/2) = 0 for l >= 2; handle l = 1 too
  prev = std::pow(std::cos(-PI / 2 + 0.0), 2 * l - 2);
  if (l == 1) prev = 1.0;
  (*cdf_u)[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double u = -PI / 2 + i * du;
    const double cur = l == 1 ? 1.0 : std::pow(std::cos(std::min(u, PI / 2)), 2 * l - 2);
    acc += 0.5 * du * (prev + cur);
    (*cdf_u)[i] = acc * c;
    prev = cur;
  }
  // normalize the last entry to exactly 1 (guards the interpolation)
  const double scale = 1.0 / (*cdf_u)[n];
  for (auto& v : *cdf_u) v *= scale;
  Measure m;
  m.kind_ = Kind::CauchyPower;
  m.repr_ = CauchyPowerRepr{l, c, cdf_u};
  return m;
}

Measure Measure::perturbed(const Measure& base, double alpha, double nu) {
  if (std::abs(alpha) > 1.0 || alpha == 0.0)
    throw validation_error("perturbed: need 0 < |alpha| <= 1");
  if (nu == 0.0) throw validation_error("perturbed: need nu != 0");
  if (!base.has_density1d())
    throw validation_error("perturbed: base must be a 1-D density");
  // base must be even
  auto [lo, hi] = base.support();
  const double r = std::min(std::abs(lo), std::abs(hi));
  for (int i = 1; i <= 16; ++i) {
    const double x = r * i / 17.0;
    if (std::abs(base.density(x) - base.density(-x)) > 1e-9 * (1.0 + base.density(x)))
      throw validation_error("perturbed: base density must be even");
  }
  if (std::abs(lo + hi) > 1e-9 * (std::abs(lo) + std::abs(hi) + 1))
    throw validation_error("perturbed: base support must be symmetric");
  Measure m;
  m.kind_ = Kind::Perturbed;
  m.repr_ = PerturbedRepr{std::make_shared<Measure>(base), alpha, nu};
  return m;
}

Measure Measure::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.size() < 2)
    throw validation_error("piecewise measure: bad knots");
  if (!std::is_sorted(knots.begin(), knots.end()))
    throw validation_error("piecewise measure: knots must be sorted");
  Measure m;
  m.kind_ = Kind::Piecewise;
  m.repr_ = PiecewiseRepr{std::move(knots), std::move(values)};
  m.validate();
  return m;
}

Measure Measure::with_char(std::function<double(double)> density,
                           std::function<std::complex<double>(double)> chf,
                           double lo, double hi, double var_bound, std::string name) {
  Measure m;
  m.kind_ = Kind::DensityChar;
  m.repr_ = CharRepr{std::move(density), std::move(chf), lo, hi, var_bound, std::move(name)};
  return m;
}

Measure Measure::torus_density(int d, std::function<double(const Eigen::VectorXd&)> density,
                               std::function<std::complex<double>(const Eigen::VectorXi&)> coeff,
                               std::string name) {
  if (d < 1) throw validation_error("torus measure: d >= 1");
  Measure m;
  m.kind_ = Kind::Torus;
  m.d_ = d;
  m.repr_ = TorusRepr{std::move(density), std::move(coeff), std::move(name)};
  return m;
}

Measure Measure::torus_uniform(int d) {
  const double dens = std::pow(TWO_PI, -d);
  return torus_density(
      d, [dens](const Eigen::VectorXd&) { return dens; },
      [d](const Eigen::VectorXi& n) -> std::complex<double> {
        return n.isZero() ? std::pow(TWO_PI, -d) : 0.0;
      },
      "torus-uniform(d=" + std::to_string(d) + ")");
}

// ----------------------------------------------------------------- queries

bool Measure::has_density1d() const {
  switch (kind_) {
    case Kind::Grid:
    case Kind::Gaussian:
    case Kind::Cauchy:
    case Kind::Uniform:
    case Kind::CauchyPower:
    case Kind::Perturbed:
    case Kind::Piecewise:
    case Kind::DensityChar:
      return true;
    default:
      return false;
  }
}

bool Measure::has_char() const { return kind_ != Kind::Torus; }

const std::vector<Eigen::VectorXd>& Measure::atoms() const {
  if (kind_ != Kind::Discrete) throw unsupported_error("atoms: not a discrete measure");
  return as<DiscreteRepr>().points;
}

const std::vector<double>& Measure::weights() const {
  if (kind_ != Kind::Discrete) throw unsupported_error("weights: not a discrete measure");
  return as<DiscreteRepr>().weights;
}

std::pair<double, double> Measure::gaussian_params() const {
  if (kind_ != Kind::Gaussian) throw unsupported_error("gaussian_params: not a Gaussian");
  const auto& r = as<GaussianRepr>();
  return {r.mu, r.s};
}

std::pair<double, double> Measure::cauchy_params() const {
  if (kind_ != Kind::Cauchy) throw unsupported_error("cauchy_params: not a Cauchy");
  const auto& r = as<CauchyRepr>();
  return {r.x0, r.g};
}

double Measure::density(double x) const {
  switch (kind_) {
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      const double u = (x - g.x0) / g.dx;
      if (u < 0 || u > double(g.values.size() - 1)) return 0.0;
      const int i = std::min(static_cast<int>(u), static_cast<int>(g.values.size()) - 2);
      const double s = u - i;
      return (1 - s) * g.values[i] + s * g.values[i + 1];
    }
    case Kind::Gaussian: {
      const auto& r = as<GaussianRepr>();
      const double z = (x - r.mu) / r.s;
      return std::exp(-0.5 * z * z) / (r.s * SQRT_TWO_PI);
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      const double z = (x - r.x0) / r.g;
      return 1.0 / (PI * r.g * (1.0 + z * z));
    }
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      return (x >= r.a && x <= r.b) ? 1.0 / (r.b - r.a) : 0.0;
    }
    case Kind::CauchyPower: {
      const auto& r = as<CauchyPowerRepr>();
      return r.norm_c * std::pow(1.0 + x * x, -r.l);
    }
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      return r.base->density(x) * (1.0 + r.alpha * std::sin(r.nu * PI * x));
    }
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      if (x < r.x.front() || x > r.x.back()) return 0.0;
      const auto it = std::upper_bound(r.x.begin(), r.x.end(), x);
      const int i = std::max<int>(1, static_cast<int>(it - r.x.begin())) - 1;
      const int j = std::min<int>(i, static_cast<int>(r.x.size()) - 2);
      const double t = (x - r.x[j]) / (r.x[j + 1] - r.x[j]);
      return (1 - t) * r.y[j] + t * r.y[j + 1];
    }
    case Kind::DensityChar:
      return as<CharRepr>().density(x);
    default:
      throw unsupported_error("density: measure has no 1-D density");
  }
}

double Measure::density(const Eigen::VectorXd& x) const {
  if (kind_ == Kind::Torus) {
    if (x.size() != d_) throw validation_error("density: dimension mismatch");
    return as<TorusRepr>().density(x);
  }
  if (x.size() != 1) throw validation_error("density: expected a length-1 vector");
  return density(x[0]);
}

std::pair<double, double> Measure::support() const {
  switch (kind_) {
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      return {g.x0, g.x0 + g.dx * (g.values.size() - 1)};
    }
    case Kind::Gaussian: {
      const auto& r = as<GaussianRepr>();
      return {r.mu - 10 * r.s, r.mu + 10 * r.s};
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      const double R = r.g * std::tan(PI * (0.5 - 1e-10));
      return {r.x0 - R, r.x0 + R};
    }
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      return {r.a, r.b};
    }
    case Kind::CauchyPower: {
      const auto& r = as<CauchyPowerRepr>();
      if (r.l == 1) {
        const double R = std::tan(PI * (0.5 - 1e-10));
        return {-R, R};
      }
      // tail mass beyond R is ~ C_l R^{1-2l}/(2l-1); solve for 1e-12
      const double R = std::pow(r.norm_c / ((2 * r.l - 1) * 1e-12), 1.0 / (2 * r.l - 1));
      return {-R, R};
    }
    case Kind::Perturbed:
      return as<PerturbedRepr>().base->support();
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      return {r.x.front(), r.x.back()};
    }
    case Kind::DensityChar: {
      const auto& r = as<CharRepr>();
      return {r.lo, r.hi};
    }
    case Kind::Discrete: {
      if (d_ != 1) throw unsupported_error("support: d > 1");
      double lo = INF, hi = -INF;
      for (auto& p : as<DiscreteRepr>().points) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
      }
      return {lo, hi};
    }
    default:
      throw unsupported_error("support: unsupported representation");
  }
}

double Measure::variation_bound() const {
  switch (kind_) {
    case Kind::Gaussian:
      return 2.0 / (as<GaussianRepr>().s * SQRT_TWO_PI);
    case Kind::Cauchy:
      return 2.0 / (PI * as<CauchyRepr>().g);
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      return 2.0 / (r.b - r.a);
    }
    case Kind::CauchyPower:
      return 2.0 * as<CauchyPowerRepr>().norm_c;
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      return r.base->variation_bound() * (1.0 + std::abs(r.alpha)) +
             std::abs(r.alpha) * std::abs(r.nu) * PI;
    }
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      double v = r.y.front() + r.y.back();
      for (size_t i = 1; i < r.y.size(); ++i) v += std::abs(r.y[i] - r.y[i - 1]);
      return v;
    }
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      double v = g.values.front() + g.values.back();
      for (size_t i = 1; i < g.values.size(); ++i)
        v += std::abs(g.values[i] - g.values[i - 1]);
      return v;
    }
    case Kind::DensityChar:
      return as<CharRepr>().var_bound;
    default:
      return INF;  // no density: characteristic function need not decay
  }
}

Rule Measure::quadrature_rule(int n) const {
  const int panels = std::max(1, n / 16);
  switch (kind_) {
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      Rule rule = composite_gl(r.a, r.b, panels);
      for (auto& w : rule.w) w /= (r.b - r.a);
      return rule;
    }
    case Kind::Gaussian: {
      // pdf-weighted rule on mu +/- 10 sigma: the truncated tail mass (~8e-24)
      // is far below the rule's own error, and the integrand stays smooth, so
      // composite Gauss-Legendre converges spectrally (a quantile-mapped rule
      // does not -- the quantile derivative blows up at the endpoints).
      const auto& r = as<GaussianRepr>();
      const double R = 10.0;
      Rule rule = composite_gl(r.mu - R * r.s, r.mu + R * r.s, panels);
      for (size_t i = 0; i < rule.x.size(); ++i) {
        const double z = (rule.x[i] - r.mu) / r.s;
        rule.w[i] *= std::exp(-0.5 * z * z) / (r.s * SQRT_TWO_PI);
      }
      return rule;
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      Rule u = composite_gl(0.0, 1.0, panels);
      Rule rule;
      rule.x.resize(u.x.size());
      rule.w = u.w;
      for (size_t i = 0; i < u.x.size(); ++i)
        rule.x[i] = r.x0 + r.g * std::tan(PI * (u.x[i] - 0.5));
      return rule;
    }
    case Kind::CauchyPower: {
      const auto& r = as<CauchyPowerRepr>();
      // x = tan(u): \int f p dx = \int f(tan u) C_l cos^{2l-2}(u) du
      Rule u = composite_gl(-PI / 2, PI / 2, panels);
      Rule rule;
      rule.x.resize(u.x.size());
      rule.w.resize(u.x.size());
      for (size_t i = 0; i < u.x.size(); ++i) {
        rule.x[i] = std::tan(u.x[i]);
        rule.w[i] = u.w[i] * r.norm_c *
                    (r.l == 1 ? 1.0 : std::pow(std::cos(u.x[i]), 2 * r.l - 2));
      }
      return rule;
    }
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      Rule rule = r.base->quadrature_rule(n);
      for (size_t i = 0; i < rule.x.size(); ++i)
        rule.w[i] *= 1.0 + r.alpha * std::sin(r.nu * PI * rule.x[i]);
      return rule;
    }
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      Rule rule;
      const int nseg = static_cast<int>(r.x.size()) - 1;
      const int per_seg = std::max(1, panels / nseg);
      for (int s = 0; s < nseg; ++s) {
        if (r.x[s + 1] <= r.x[s]) continue;
        Rule seg = composite_gl(r.x[s], r.x[s + 1], per_seg);
        for (size_t i = 0; i < seg.x.size(); ++i) {
          rule.x.push_back(seg.x[i]);
          rule.w.push_back(seg.w[i] * density(seg.x[i]));
        }
      }
      return rule;
    }
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      const int N = static_cast<int>(g.values.size());
      const int stride = std::max(1, (N - 1) / std::max(2, n));
      Rule rule;
      std::vector<int> idx;
      for (int i = 0; i < N; i += stride) idx.push_back(i);
      if (idx.back() != N - 1) idx.push_back(N - 1);
      for (size_t j = 0; j < idx.size(); ++j) {
        const int i = idx[j];
        double w = 0.0;
        if (j > 0) w += 0.5 * (idx[j] - idx[j - 1]) * g.dx;
        if (j + 1 < idx.size()) w += 0.5 * (idx[j + 1] - idx[j]) * g.dx;
        rule.x.push_back(g.x0 + i * g.dx);
        rule.w.push_back(w * g.values[i]);
      }
      return rule;
    }
    case Kind::DensityChar: {
      const auto& r = as<CharRepr>();
      Rule rule = composite_gl(r.lo, r.hi, panels);
      for (size_t i = 0; i < rule.x.size(); ++i) rule.w[i] *= r.density(rule.x[i]);
      return rule;
    }
    default:
      throw unsupported_error("quadrature_rule: measure has no 1-D density");
  }
}

// ------------------------------------------------------------ probability

std::complex<double> Measure::char_function(double omega) const {
  switch (kind_) {
    case Kind::Discrete: {
      if (d_ != 1) throw validation_error("char_function: scalar omega on d>1 measure");
      const auto& r = as<DiscreteRepr>();
      std::complex<double> acc = 0.0;
      for (size_t i = 0; i < r.points.size(); ++i)
        acc += r.weights[i] * std::exp(I_UNIT * omega * r.points[i][0]);
      return acc;
    }
    case Kind::Gaussian: {
      const auto& r = as<GaussianRepr>();
      return std::exp(I_UNIT * r.mu * omega - 0.5 * r.s * r.s * omega * omega);
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      return std::exp(I_UNIT * r.x0 * omega - r.g * std::abs(omega));
    }
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      if (std::abs(omega) * (r.b - r.a) < 1e-8)
        return std::complex<double>(1.0, 0.5 * (r.a + r.b) * omega);
      return (std::exp(I_UNIT * r.b * omega) - std::exp(I_UNIT * r.a * omega)) /
             (I_UNIT * omega * (r.b - r.a));
    }
    case Kind::CauchyPower: {
      // even real density: phi(w) = \int cos(wx) p(x) dx via the tan rule
      Rule rule = quadrature_rule(2048);
      double acc = 0.0;
      for (size_t i = 0; i < rule.x.size(); ++i)
        acc += rule.w[i] * std::cos(omega * rule.x[i]);
      return acc;
    }
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      const double s = r.nu * PI;
      const std::complex<double> base = r.base->char_function(omega);
      return base + I_UNIT * (r.alpha / 2.0) *
                        (r.base->char_function(omega - s) - r.base->char_function(omega + s));
    }
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      std::complex<double> acc = 0.0;
      for (size_t s = 0; s + 1 < r.x.size(); ++s)
        acc += segment_char(r.x[s], r.x[s + 1], r.y[s], r.y[s + 1], omega);
      return acc;
    }
    case Kind::DensityChar:
      return as<CharRepr>().chf(omega);
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      std::complex<double> acc = 0.0;
      const int N = static_cast<int>(g.values.size());
      for (int i = 0; i < N; ++i) {
        const double w = (i == 0 || i == N - 1) ? 0.5 * g.dx : g.dx;
        acc += w * g.values[i] * std::exp(I_UNIT * omega * (g.x0 + i * g.dx));
      }
      return acc;
    }
    default:
      throw unsupported_error("char_function: unsupported representation");
  }
}

std::complex<double> Measure::char_function(const Eigen::VectorXd& omega) const {
  if (omega.size() == 1) return char_function(omega[0]);
  if (kind_ != Kind::Discrete)
    throw unsupported_error("char_function: vector omega only for discrete measures");
  const auto& r = as<DiscreteRepr>();
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i < r.points.size(); ++i)
    acc += r.weights[i] * std::exp(I_UNIT * omega.dot(r.points[i]));
  return acc;
}

double Measure::cdf(double x) const {
  switch (kind_) {
    case Kind::Discrete: {
      if (d_ != 1) throw unsupported_error("cdf: d > 1");
      const auto& r = as<DiscreteRepr>();
      double acc = 0.0;
      for (size_t i = 0; i < r.points.size(); ++i)
        if (r.points[i][0] <= x) acc += r.weights[i];
      return acc;
    }
    case Kind::Gaussian: {
      const auto& r = as<GaussianRepr>();
      return normal_cdf((x - r.mu) / r.s);
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      return 0.5 + std::atan((x - r.x0) / r.g) / PI;
    }
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      if (x <= r.a) return 0.0;
      if (x >= r.b) return 1.0;
      return (x - r.a) / (r.b - r.a);
    }
    case Kind::CauchyPower: {
      const auto& r = as<CauchyPowerRepr>();
      const double u = std::atan(x);
      const int n = static_cast<int>(r.cdf_u->size()) - 1;
      const double t = (u + PI / 2) / PI * n;
      const int i = std::clamp(static_cast<int>(t), 0, n - 1);
      const double s = t - i;
      return (1 - s) * (*r.cdf_u)[i] + s * (*r.cdf_u)[i + 1];
    }
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      const double base_cdf = r.base->cdf(x);
      auto [lo, hi] = r.base->support();
      if (x <= lo) return 0.0;
      const double upper = std::min(x, hi);
      const Measure& q = *r.base;
      const double nu = r.nu;
      QuadResult corr = integrate(
          [&q, nu](double t) { return q.density(t) * std::sin(nu * PI * t); }, lo, upper,
          1e-11);
      return std::clamp(base_cdf + r.alpha * corr.value, 0.0, 1.0);
    }
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      if (x <= r.x.front()) return 0.0;
      double acc = 0.0;
      for (size_t s = 0; s + 1 < r.x.size(); ++s) {
        if (x >= r.x[s + 1]) {
          acc += 0.5 * (r.y[s] + r.y[s + 1]) * (r.x[s + 1] - r.x[s]);
        } else if (x > r.x[s]) {
          const double t = x - r.x[s];
          const double m = (r.y[s + 1] - r.y[s]) / (r.x[s + 1] - r.x[s]);
          acc += r.y[s] * t + 0.5 * m * t * t;
          break;
        } else {
          break;
        }
      }
      return std::min(acc, 1.0);
    }
    case Kind::DensityChar: {
      const auto& r = as<CharRepr>();
      if (x <= r.lo) return 0.0;
      QuadResult q = integrate(r.density, r.lo, std::min(x, r.hi), 1e-11);
      return std::clamp(q.value, 0.0, 1.0);
    }
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      const int N = static_cast<int>(g.values.size());
      if (x <= g.x0) return 0.0;
      double acc = 0.0;
      for (int i = 0; i + 1 < N; ++i) {
        const double xa = g.x0 + i * g.dx, xb = xa + g.dx;
        if (x >= xb) {
          acc += 0.5 * g.dx * (g.values[i] + g.values[i + 1]);
        } else {
          const double t = (x - xa) / g.dx;
          const double yb = (1 - t) * g.values[i] + t * g.values[i + 1];
          acc += 0.5 * (x - xa) * (g.values[i] + yb);
          break;
        }
      }
      return std::min(acc, 1.0);
    }
    default:
      throw unsupported_error("cdf: unsupported representation");
  }
}

Sample Measure::sample(int m, std::uint64_t seed) const {
  if (m < 1) throw validation_error("sample: m >= 1 required");
  Sample out;
  out.seed = seed;
  out.source = describe();
  out.points.reserve(m);
  Rng rng(mix_seed(seed, 0));
  switch (kind_) {
    case Kind::Discrete: {
      if (d_ != 1) throw unsupported_error("sample: d > 1 discrete");
      const auto& r = as<DiscreteRepr>();
      std::vector<double> cum(r.weights.size());
      std::partial_sum(r.weights.begin(), r.weights.end(), cum.begin());
      for (int i = 0; i < m; ++i) {
        const double u = uniform01(rng) * cum.back();
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        out.points.push_back(r.points[it - cum.begin()][0]);
      }
      break;
    }
    case Kind::Gaussian: {
      const auto& r = as<GaussianRepr>();
      for (int i = 0; i < m; ++i)
        out.points.push_back(r.mu + r.s * normal_quantile(uniform01(rng)));
      break;
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      for (int i = 0; i < m; ++i)
        out.points.push_back(r.x0 + r.g * std::tan(PI * (uniform01(rng) - 0.5)));
      break;
    }
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      for (int i = 0; i < m; ++i)
        out.points.push_back(r.a + (r.b - r.a) * uniform01(rng));
      break;
    }
    case Kind::CauchyPower: {
      const auto& r = as<CauchyPowerRepr>();
      const int n = static_cast<int>(r.cdf_u->size()) - 1;
      for (int i = 0; i < m; ++i) {
        const double u = uniform01(rng);
        const auto& c = *r.cdf_u;
        int lo = 0, hi = n;
        while (hi - lo > 1) {
          const int mid = (lo + hi) / 2;
          (c[mid] < u ? lo : hi) = mid;
        }
        const double frac = (u - c[lo]) / std::max(c[hi] - c[lo], 1e-300);
        const double uu = -PI / 2 + (lo + frac) * (PI / n);
        out.points.push_back(std::tan(std::clamp(uu, -PI / 2 + 1e-12, PI / 2 - 1e-12)));
      }
      break;
    }
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      const double envelope = 1.0 + std::abs(r.alpha);
      long proposals = 0;
      Rng base_rng(mix_seed(seed, 1));
      while (static_cast<int>(out.points.size()) < m) {
        if (++proposals > 1000000)
          throw numerical_error("rejection sampling: proposal cap exceeded (bad envelope)");
        const double x = r.base->sample(1, base_rng())
                             .points.front();  // derived stream per proposal
        const double accept =
            (1.0 + r.alpha * std::sin(r.nu * PI * x)) / envelope;
        if (uniform01(rng) <= accept) out.points.push_back(x);
      }
      break;
    }
    case Kind::Grid:
    case Kind::Piecewise:
    case Kind::DensityChar: {
      // inverse CDF by bisection on the monotone cdf()
      auto [lo, hi] = support();
      for (int i = 0; i < m; ++i) {
        const double u = uniform01(rng);
        double a = lo, b = hi;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (a + b);
          (cdf(mid) < u ? a : b) = mid;
        }
        out.points.push_back(0.5 * (a + b));
      }
      break;
    }
    default:
      throw unsupported_error("sample: unsupported representation");
  }
  return out;
}

std::complex<double> Measure::torus_fourier_coeff(const Eigen::VectorXi& n) const {
  if (kind_ != Kind::Torus) throw unsupported_error("torus_fourier_coeff: not a torus measure");
  const auto& r = as<TorusRepr>();
  if (n.size() != d_) throw validation_error("torus_fourier_coeff: dimension mismatch");
  if (r.coeff) return r.coeff(n);
  if (d_ != 1)
    throw unsupported_error("torus_fourier_coeff: quadrature fallback only for d=1");
  const int k = n[0];
  const auto& dens = r.density;
  QuadResult re = integrate(
      [&dens, k](double x) {
        Eigen::VectorXd v(1);
        v << x;
        return dens(v) * std::cos(k * x);
      },
      0.0, TWO_PI, 1e-12);
  QuadResult im = integrate(
      [&dens, k](double x) {
        Eigen::VectorXd v(1);
        v << x;
        return -dens(v) * std::sin(k * x);
      },
      0.0, TWO_PI, 1e-12);
  return std::complex<double>(re.value, im.value) / TWO_PI;
}

// ---------------------------------------------------------------- validate

void Measure::validate() const {
  switch (kind_) {
    case Kind::Discrete: {
      const auto& r = as<DiscreteRepr>();
      double mass = 0.0;
      for (double w : r.weights) {
        if (w < 0) throw validation_error("discrete measure: negative weight");
        mass += w;
      }
      if (std::abs(mass - 1.0) > 1e-8)
        throw validation_error("discrete measure: total mass " + fmt(mass) + " != 1");
      for (size_t i = 0; i < r.points.size(); ++i)
        for (size_t j = i + 1; j < r.points.size(); ++j)
          if ((r.points[i] - r.points[j]).norm() < 1e-12)
            throw validation_error("discrete measure: duplicate atoms");
      break;
    }
    case Kind::Grid: {
      const auto& g = as<GridRepr>();
      double mass = 0.0;
      for (size_t i = 0; i < g.values.size(); ++i) {
        if (g.values[i] < 0) throw validation_error("grid measure: negative density");
        const double w = (i == 0 || i + 1 == g.values.size()) ? 0.5 : 1.0;
        mass += w * g.values[i] * g.dx;
      }
      if (std::abs(mass - 1.0) > 1e-8)
        throw validation_error("grid measure: trapezoid mass " + fmt(mass) + " != 1");
      break;
    }
    case Kind::Piecewise: {
      const auto& r = as<PiecewiseRepr>();
      double mass = 0.0;
      for (size_t s = 0; s + 1 < r.x.size(); ++s) {
        if (r.y[s] < -1e-15 || r.y[s + 1] < -1e-15)
          throw validation_error("piecewise measure: negative density");
        mass += 0.5 * (r.y[s] + r.y[s + 1]) * (r.x[s + 1] - r.x[s]);
      }
      if (std::abs(mass - 1.0) > 1e-8)
        throw validation_error("piecewise measure: mass " + fmt(mass) + " != 1");
      break;
    }
    case Kind::Perturbed: {
      Rule r = quadrature_rule(1024);
      double mass = 0.0;
      for (double w : r.w) mass += w;
      if (std::abs(mass - 1.0) > 1e-6)
        throw validation_error("perturbed measure: mass " + fmt(mass) + " != 1");
      break;
    }
    case Kind::DensityChar: {
      const auto& r = as<CharRepr>();
      QuadResult q = integrate(r.density, r.lo, r.hi, 1e-10);
      if (std::abs(q.value - 1.0) > 1e-6)
        throw validation_error("density measure: mass " + fmt(q.value) + " != 1");
      const int probes = 4096;
      for (int i = 0; i <= probes; ++i) {
        const double x = r.lo + (r.hi - r.lo) * i / probes;
        if (r.density(x) < -1e-12)
          throw validation_error("density measure: negative density at x=" + fmt(x));
      }
      break;
    }
    case Kind::Torus: {
      Eigen::VectorXi zero = Eigen::VectorXi::Zero(d_);
      const std::complex<double> a0 = torus_fourier_coeff(zero);
      if (std::abs(a0 - std::pow(TWO_PI, -d_)) > 1e-6)
        throw validation_error("torus measure: A(0) != (2pi)^-d");
      break;
    }
    default:
      break;  // analytic families validated at construction
  }
}

std::string Measure::describe() const {
  switch (kind_) {
    case Kind::Discrete: {
      const auto& r = as<DiscreteRepr>();
      if (d_ == 1 && r.points.size() <= 4) {
        std::string s = "discrete[";
        for (size_t i = 0; i < r.points.size(); ++i) {
          if (i) s += ",";
          s += "(" + fmt(r.points[i][0]) + "," + fmt(r.weights[i]) + ")";
        }
        return s + "]";
      }
      return "discrete[" + std::to_string(r.points.size()) + " atoms]";
    }
    case Kind::Grid:
      return "grid[" + std::to_string(as<GridRepr>().values.size()) + " pts]";
    case Kind::Gaussian: {
      const auto& r = as<GaussianRepr>();
      return "gaussian(" + fmt(r.mu) + "," + fmt(r.s) + ")";
    }
    case Kind::Cauchy: {
      const auto& r = as<CauchyRepr>();
      return "cauchy(" + fmt(r.x0) + "," + fmt(r.g) + ")";
    }
    case Kind::Uniform: {
      const auto& r = as<UniformRepr>();
      return "uniform(" + fmt(r.a) + "," + fmt(r.b) + ")";
    }
    case Kind::CauchyPower:
      return "cauchypow(" + std::to_string(as<CauchyPowerRepr>().l) + ")";
    case Kind::Perturbed: {
      const auto& r = as<PerturbedRepr>();
      return "perturbed(" + r.base->describe() + ",alpha=" + fmt(r.alpha) +
             ",nu=" + fmt(r.nu) + ")";
    }
    case Kind::Piecewise:
      return "piecewise[" + std::to_string(as<PiecewiseRepr>().x.size()) + " knots]";
    case Kind::DensityChar:
      return as<CharRepr>().name;
    case Kind::Torus:
      return as<TorusRepr>().name;
  }
  return "measure";
}

}  // namespace kdist
