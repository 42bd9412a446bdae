#include "kdist/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "kdist/quadrature.hpp"

namespace kdist {
namespace {

constexpr std::complex<double> I_UNIT{0.0, 1.0};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// density of the sum of N independent Uniform(0,1) variables
double irwin_hall_pdf(int N, double t) {
  if (t <= 0.0 || t >= N) return 0.0;
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= static_cast<int>(t); ++j) {
    acc += (j % 2 ? -1.0 : 1.0) * binom * std::pow(t - j, N - 1);
    binom *= double(N - j) / (j + 1);
  }
  double fact = 1.0;
  for (int j = 2; j <= N - 1; ++j) fact *= j;
  return acc / fact;
}

// zigzag perturbation on a uniform base: q = Uniform(-beta, beta),
// p = q + alpha [T(x + tau/2) - T(x - tau/2)] with T the unit triangle of
// half-width tau/2. Its transform alpha (tau/2) sinc^2(w tau/4) (-2i sin(w tau/2))
// vanishes on the whole lattice (2 pi / tau) Z, zero included.
struct ZigzagPair {
  Measure P;
  Measure Q;
  double tv;
  ThetaPerturbation theta;
};

ZigzagPair make_zigzag(double tau, double beta, double alpha) {
  if (!(tau > 0) || !(beta >= tau))
    throw validation_error("zigzag construction: need 0 < tau <= beta");
  const double u = 1.0 / (2.0 * beta);
  if (!(alpha > 0) || alpha > u)
    throw validation_error("zigzag construction: need 0 < alpha <= 1/(2 beta)");
  const double h = 0.5 * tau;
  std::vector<double> knots = {-beta, -tau, -h, 0.0, h, tau, beta};
  std::vector<double> pvals = {u, u, u + alpha, u, u - alpha, u, u};
  if (beta == tau) {  // drop the duplicated end knots
    knots = {-beta, -h, 0.0, h, beta};
    pvals = {u, u + alpha, u, u - alpha, u};
  }
  ZigzagPair out{Measure::piecewise_linear(knots, pvals), Measure::uniform(-beta, beta),
                 alpha * tau, {}};
  // theta(w) = alpha * h * sinc^2(w h / 2) * (-2 i sin(w h))   [triangle pair]
  out.theta.theta = [alpha, h](double w) -> std::complex<double> {
    const double t = 0.5 * w * h;
    const double s = std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    return -2.0 * I_UNIT * alpha * h * s * s * std::sin(w * h);
  };
  out.theta.theta_inv = [alpha, h](double x) {
    const double tp = std::max(0.0, 1.0 - std::abs(x + h) / h);
    const double tm = std::max(0.0, 1.0 - std::abs(x - h) / h);
    return alpha * (tp - tm);
  };
  out.theta.support = {{-INF, INF}};
  out.theta.describe = "triangle pair, transform vanishing on (2 pi/" + fmt(tau) + ") Z";
  return out;
}

}  // namespace

Measure perturb_sinusoid(const Measure& q, double alpha, double nu) {
  return Measure::perturbed(q, alpha, nu);
}

ConstructedPair construct_sinc_cauchy(double beta, int N, double w0, double alpha) {
  if (!(beta > 0)) throw validation_error("sinc construction: beta > 0");
  if (N < 2 || N % 2 != 0)
    throw validation_error("sinc construction: N must be even and >= 2");
  if (!(w0 >= 0.5 * (N + 2) * beta))
    throw validation_error("sinc construction: need w0 >= (N+2) beta / 2");

  // perturbation g(x) = alpha beta^N sin(w0 x) sinc^N(beta x / 2) / sqrt(2 pi)
  auto sincf = [](double t) {
    return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  };
  const double amp = alpha * std::pow(beta, N) / SQRT_TWO_PI;
  auto g = [amp, beta, N, w0, sincf](double x) {
    return amp * std::sin(w0 * x) * std::pow(sincf(0.5 * beta * x), N);
  };

  // positivity bound: alpha <= sqrt(2 pi) / (pi beta^N sup (1+x^2)|sin sinc^N|).
  // The sup is located on a coarse grid and sharpened by golden-section
  // refinement around the winner; the direct nonnegativity scan on the
  // verification grid below remains the hard check.
  auto envelope = [beta, N, w0, sincf](double x) {
    return (1.0 + x * x) * std::abs(std::sin(w0 * x)) *
           std::pow(std::abs(sincf(0.5 * beta * x)), N);
  };
  double sup = 0.0, sup_x = 0.0;
  const double X = 500.0;
  const int M = 1 << 15;
  for (int i = 0; i <= M; ++i) {
    const double x = X * i / M;
    const double v = envelope(x);
    if (v > sup) {
      sup = v;
      sup_x = x;
    }
  }
  {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::max(0.0, sup_x - X / M), b = sup_x + X / M;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
      if (envelope(c) > envelope(d))
        b = d;
      else
        a = c;
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    sup = std::max(sup, envelope(0.5 * (a + b)));
  }
  sup = std::max(sup, std::pow(2.0 / beta, N) * (1.0 + X * X) / std::pow(X, N));
  const double alpha_max = SQRT_TWO_PI / (PI * std::pow(beta, N) * sup);
  if (!(alpha > 0) || alpha > alpha_max)
    throw validation_error("sinc construction: alpha exceeds the positivity bound " +
                           fmt(alpha_max));

  const Measure Q = Measure::cauchy(0.0, 1.0);

  // transform of g: FT(sinc^N(beta x/2)) = (2 pi / beta) f_N(w/beta + N/2)
  // with f_N the Irwin-Hall density; the sine factor shifts it to +-w0.
  auto bhat = [beta, N](double w) {
    return (TWO_PI / beta) * irwin_hall_pdf(N, w / beta + 0.5 * N);
  };
  const double pre = alpha * std::pow(beta, N) / SQRT_TWO_PI;
  auto dphi = [pre, bhat, w0](double w) -> std::complex<double> {
    return pre / (2.0 * I_UNIT) * (bhat(w + w0) - bhat(w - w0));
  };

  auto density = [Q, g](double x) { return Q.density(x) + g(x); };
  // verify nonnegativity directly on a fine grid
  for (int i = 0; i <= M; ++i) {
    const double x = -X + 2.0 * X * i / M;
    if (density(x) < 0)
      throw numerical_error("sinc construction: density negative at x=" + fmt(x));
  }
  auto chf = [Q, dphi](double w) { return Q.char_function(w) + dphi(w); };

  // variation bound: Cauchy part + numeric variation of g (tails negligible)
  double var_g = 0.0, prev = g(-200.0);
  for (int i = 1; i <= (1 << 19); ++i) {
    const double cur = g(-200.0 + 400.0 * i / (1 << 19));
    var_g += std::abs(cur - prev);
    prev = cur;
  }
  const double var_bound = 2.0 / PI + var_g + 0.1;

  ConstructedPair pair{
      Measure::with_char(density, chf, -2e6, 2e6, var_bound,
                         "cauchy+bandgap(beta=" + fmt(beta) + ",N=" + fmt(N) +
                             ",w0=" + fmt(w0) + ",alpha=" + fmt(alpha) + ")"),
      Q, make_sinc(beta), 0.0,
      "perturbation transform supported in |w| in [w0 - N beta/2, w0 + N beta/2], "
      "disjoint from the kernel passband [-beta, beta]",
      0.0, {}};

  // TV = \int |g|: quadrature on [-X, X] plus the envelope tail
  QuadResult tvq = integrate([g](double x) { return std::abs(g(x)); }, -X, X, 1e-9);
  const double tail =
      2.0 * alpha * std::pow(2.0, N) / (SQRT_TWO_PI * (N - 1) * std::pow(X, N - 1));
  pair.tv = tvq.value + tail;

  pair.theta.theta = dphi;
  pair.theta.theta_inv = g;
  pair.theta.support = {{-w0 - 0.5 * N * beta, -w0 + 0.5 * N * beta},
                        {w0 - 0.5 * N * beta, w0 + 0.5 * N * beta}};
  pair.theta.describe = "band-limited perturbation centred at +-" + fmt(w0);
  return pair;
}

ConstructedPair construct_dirichlet_uniform(double tau, int l, double beta, double alpha) {
  if (l < 1) throw validation_error("dirichlet construction: l >= 1");
  ZigzagPair z = make_zigzag(tau, beta, alpha);
  ConstructedPair pair{z.P, z.Q, make_dirichlet_r(l, tau), 0.0,
                       "perturbation transform vanishes on the kernel lattice (2 pi/" +
                           fmt(tau) + ") Z",
                       z.tv, z.theta};
  return pair;
}

ConstructedPair construct_torus_flat(int d, const Eigen::VectorXi& n0, double alpha) {
  if (d < 1 || n0.size() != d)
    throw validation_error("torus construction: dimension mismatch");
  if (n0.isZero()) throw validation_error("torus construction: n0 != 0 required");
  const double flat = std::pow(TWO_PI, -d);
  if (!(alpha > 0) || alpha > 0.5 * flat)
    throw validation_error("torus construction: need 0 < alpha <= (2 pi)^-d / 2");
  Eigen::VectorXi n0c = n0;
  auto density = [flat, alpha, n0c](const Eigen::VectorXd& x) {
    double phase = 0.0;
    for (int j = 0; j < n0c.size(); ++j) phase += n0c[j] * x[j];
    return flat - 2.0 * alpha * std::sin(phase);
  };
  // A_P(n0) = i alpha, A_P(-n0) = conj = -i alpha, A_P(0) = (2 pi)^-d
  auto coeff = [flat, alpha, n0c](const Eigen::VectorXi& n) -> std::complex<double> {
    if (n.isZero()) return flat;
    if ((n - n0c).isZero()) return I_UNIT * alpha;
    if ((n + n0c).isZero()) return -I_UNIT * alpha;
    return 0.0;
  };
  Measure P = Measure::torus_density(d, density, coeff,
                                     "torus-flat+sin(n0.x), alpha=" + fmt(alpha));
  Measure Q = Measure::torus_uniform(d);
  const int nmax = n0.cwiseAbs().maxCoeff();
  TorusKernelSpec spec;
  spec.family = TorusKernelSpec::Family::Dirichlet;
  spec.n = std::max(1, nmax - 1);
  ConstructedPair pair{P, Q, nmax >= 2 ? make_torus(spec, d) : nullptr, 0.0,
                       "kernel coefficient vanishes at the perturbed frequency n0",
                       4.0 * alpha * std::pow(TWO_PI, d) / PI, {}};
  return pair;
}

EigenSmallResult eigen_small_mmd(const Kernel& k, const Measure& q_grid, int l,
                                 double tau, int grid_points) {
  if (grid_points < 8) throw validation_error("eigen construction: too few grid points");
  if (!q_grid.has_density1d())
    throw unsupported_error("eigen construction: base measure needs a density");
  const auto [a, b] = q_grid.support();
  const int n = grid_points;
  if (l < 0 || l >= n) throw validation_error("eigen construction: l out of range");
  const double h = (b - a) / (n - 1);

  Eigen::VectorXd x(n), d(n), q(n);
  for (int i = 0; i < n; ++i) {
    x[i] = a + i * h;
    d[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    q[i] = q_grid.density(x[i]);
  }
  // normalize q on the grid so p below has exact discrete mass 1
  q /= q.dot(d);

  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A(i, j) = std::sqrt(d[i]) * k(x[i], x[j]) * std::sqrt(d[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw numerical_error("eigen construction: eigensolve failed");

  // sort descending; eigenfunctions phi_j(x_i) = u_j(i) / sqrt(d_i)
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = n - 1 - i;  // Eigen sorts ascending
  const int li = order[l];
  const double lambda_l = std::max(es.eigenvalues()[li], 0.0);

  // coefficients of the constant function e = 1: e~_j = <e, phi_j>
  Eigen::VectorXd et(n);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += d[i] * es.eigenvectors()(i, j) / std::sqrt(d[i]);
    et[j] = acc;
  }
  const double e_norm_sq = et.squaredNorm();
  const double alpha_l = -tau * et[li] / e_norm_sq;

  Eigen::VectorXd phi_l(n);
  for (int i = 0; i < n; ++i) phi_l[i] = es.eigenvectors()(i, li) / std::sqrt(d[i]);

  Eigen::VectorXd p = q + Eigen::VectorXd::Constant(n, alpha_l) + tau * phi_l;
  if (p.minCoeff() < 0)
    throw validation_error("eigen construction: tau too large, density goes negative");

  // predicted gamma from the eigen expansion of u = p - q
  double pred_sq = 0.0;
  const double rho_ll = et[li] * et[li] / e_norm_sq;
  for (int j = 0; j < n; ++j) {
    const double rho_jl = et[j] * et[li] / e_norm_sq;
    const double c = (j == li ? 1.0 : 0.0) - rho_jl;
    pred_sq += std::max(es.eigenvalues()[j], 0.0) * c * c;
  }
  pred_sq *= tau * tau;

  // direct gamma through the same discrete bilinear form
  Eigen::VectorXd u = p - q;
  double direct_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += d[j] * u[j] * k(x[i], x[j]);
    direct_sq += d[i] * u[i] * row;
  }

  std::vector<double> pv(p.data(), p.data() + n), qv(q.data(), q.data() + n);
  double tv_acc = 0.0;
  for (int i = 0; i < n; ++i) tv_acc += d[i] * std::abs(u[i]);
  ConstructedPair pair{Measure::grid(a, h, pv), Measure::grid(a, h, qv), nullptr,
                       pred_sq, "eigen-direction perturbation of size tau", tv_acc, {}};
  const double predicted = std::sqrt(std::max(pred_sq, 0.0));
  const double direct = std::sqrt(std::max(direct_sq, 0.0));
  return EigenSmallResult{std::move(pair), predicted, direct,
                          std::abs(predicted - direct), lambda_l,
                          std::abs(tau * (1.0 - rho_ll))};
}

ConstructedPair pair_with_zero_gamma(const KernelPtr& k) {
  if (!k) throw validation_error("pair_with_zero_gamma: null kernel");

  if (k->on_torus()) {
    const auto* tk = dynamic_cast<const TorusKernel*>(k.get());
    if (!tk) throw unsupported_error("pair_with_zero_gamma: unknown torus kernel");
    int n0 = 0;
    for (int j = 1; j <= 10000; ++j)
      if (tk->coeff1(j) == 0.0) {
        n0 = j;
        break;
      }
    if (n0 == 0)
      throw unsupported_error("pair_with_zero_gamma: no vanishing torus coefficient");
    Eigen::VectorXi v = Eigen::VectorXi::Zero(k->dim());
    v[0] = n0;
    ConstructedPair pair = construct_torus_flat(k->dim(), v, 0.25 * std::pow(TWO_PI, -k->dim()));
    pair.kernel = k;
    pair.provenance = "kernel coefficient vanishes at n = " + fmt(n0);
    return pair;
  }

  const std::string name = k->describe();
  if (name == "dotproduct" || name == "poly2") {
    // moment matching: k = x.y sees only the mean, k = (1+x.y)^2 only the
    // first two moments; both pairs share mean 0 and (for poly2) variance 1.
    auto lift = [&](std::initializer_list<std::pair<double, double>> atoms) {
      std::vector<Eigen::VectorXd> pts;
      std::vector<double> w;
      for (auto& [x, p] : atoms) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(k->dim());
        v[0] = x;
        pts.push_back(v);
        w.push_back(p);
      }
      return Measure::discrete(std::move(pts), std::move(w));
    };
    ConstructedPair pair{lift({{-1.0, 0.5}, {1.0, 0.5}}),
                         lift({{-2.0, 0.125}, {0.0, 0.75}, {2.0, 0.125}}), k, 0.0,
                         "distinct measures with matching first and second moments",
                         2.0 * 0.75, {}};
    return pair;
  }

  SpectrumInfo sp;
  try {
    sp = k->spectrum();
  } catch (const unsupported_error&) {
    throw unsupported_error("pair_with_zero_gamma: no recipe for " + name);
  }
  if (sp.kind != SpectrumInfo::Kind::Lattice)
    throw unsupported_error("pair_with_zero_gamma: spectrum of " + name +
                            " is not a lattice");
  // find a base frequency with every atom an integer multiple of it
  double bmin = 0.0;
  for (const auto& [loc, wgt] : sp.atoms) {
    (void)wgt;
    if (std::abs(loc) > 1e-12 && (bmin == 0.0 || std::abs(loc) < bmin))
      bmin = std::abs(loc);
  }
  if (bmin == 0.0) bmin = 1.0;  // only the zero atom (constant kernel)
  double base = 0.0;
  for (int div = 1; div <= 16 && base == 0.0; ++div) {
    const double cand = bmin / div;
    bool ok = true;
    for (const auto& [loc, wgt] : sp.atoms) {
      (void)wgt;
      const double r = std::abs(loc) / cand;
      if (std::abs(r - std::round(r)) > 1e-9 * (1.0 + r)) {
        ok = false;
        break;
      }
    }
    if (ok) base = cand;
  }
  if (base == 0.0)
    throw unsupported_error("pair_with_zero_gamma: atoms of " + name +
                            " share no common base frequency");
  const double tau = TWO_PI / base;
  const double beta = 1.5 * tau;
  ZigzagPair z = make_zigzag(tau, beta, 0.2 / beta);
  ConstructedPair pair{z.P, z.Q, k, 0.0,
                       "perturbation transform vanishes on the kernel lattice (base "
                       "frequency " + fmt(base) + ")",
                       z.tv, z.theta};
  return pair;
}

}  // namespace kdist
