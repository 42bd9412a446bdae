#include "kdist/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace kdist {
namespace {

// One side of the bilinear form \int\int k dP dQ: either explicit atoms or a
// 1-D quadrature rule standing in for the density.
struct Side {
  std::vector<double> x;  // 1-D locations
  std::vector<double> w;  // signed weights
};

Side make_side(const Measure& M, int n) {
  Side s;
  if (M.is_discrete()) {
    if (M.dim() != 1) throw unsupported_error("bilinear form: d > 1 needs both sides discrete");
    for (size_t i = 0; i < M.atoms().size(); ++i) {
      s.x.push_back(M.atoms()[i][0]);
      s.w.push_back(M.weights()[i]);
    }
  } else if (M.has_density1d()) {
    Rule r = M.quadrature_rule(n);
    s.x = std::move(r.x);
    s.w = std::move(r.w);
  } else {
    throw unsupported_error("bilinear form: measure is neither discrete nor a 1-D density");
  }
  return s;
}

double bilinear(const Kernel& k, const Side& a, const Side& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.x.size(); ++i) {
    double row = 0.0;
    for (size_t j = 0; j < b.x.size(); ++j) row += b.w[j] * k(a.x[i], b.x[j]);
    acc += a.w[i] * row;
  }
  return acc;
}

double gamma_sq_rules(const Kernel& k, const Measure& P, const Measure& Q, int n) {
  const Side sp = make_side(P, n), sq = make_side(Q, n);
  return bilinear(k, sp, sp) + bilinear(k, sq, sq) - 2.0 * bilinear(k, sp, sq);
}

// gamma^2 between 1-D Gaussians under the Gaussian kernel, from
// E exp(-(X-Y)^2/(2 s^2)) = s/sqrt(s^2+u^2+v^2) exp(-(a-b)^2/(2(s^2+u^2+v^2)))
// for independent X ~ N(a,u^2), Y ~ N(b,v^2).
double gaussian_cross_term(double sk, double a, double u, double b, double v) {
  const double t = sk * sk + u * u + v * v;
  return sk / std::sqrt(t) * std::exp(-0.5 * (a - b) * (a - b) / t);
}

}  // namespace

std::string to_string(MMDResult::Path p) {
  switch (p) {
    case MMDResult::Path::DiscreteExact: return "discrete-exact";
    case MMDResult::Path::DensityQuadrature: return "density-quadrature";
    case MMDResult::Path::SpectralQuadrature: return "spectral-quadrature";
    case MMDResult::Path::TorusSeries: return "torus-series";
    case MMDResult::Path::ClosedForm: return "closed-form";
    case MMDResult::Path::UStatistic: return "u-statistic";
    case MMDResult::Path::VStatistic: return "v-statistic";
  }
  return "?";
}

MMDResult make_result(double gamma_sq, MMDResult::Path path, double err) {
  MMDResult r;
  r.gamma_sq = gamma_sq;
  r.gamma = std::sqrt(std::max(gamma_sq, 0.0));
  r.path = path;
  r.err_estimate = err;
  return r;
}

MMDResult gamma_sq_discrete(const Kernel& k, const Measure& P, const Measure& Q) {
  if (!P.is_discrete() || !Q.is_discrete())
    throw unsupported_error("gamma_sq_discrete: both measures must be discrete");
  // union support with signed weights mu = P - Q
  std::vector<Eigen::VectorXd> pts = P.atoms();
  std::vector<double> mu = P.weights();
  for (size_t j = 0; j < Q.atoms().size(); ++j) {
    bool merged = false;
    for (size_t i = 0; i < pts.size(); ++i)
      if ((pts[i] - Q.atoms()[j]).norm() < 1e-14) {
        mu[i] -= Q.weights()[j];
        merged = true;
        break;
      }
    if (!merged) {
      pts.push_back(Q.atoms()[j]);
      mu.push_back(-Q.weights()[j]);
    }
  }
  double acc = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < pts.size(); ++j)
      acc += mu[i] * mu[j] * k.eval(pts[i], pts[j]);
  return make_result(acc, MMDResult::Path::DiscreteExact);
}

double gamma_sq_weak_sequence(const Kernel& k, int n) {
  if (n < 1) throw validation_error("gamma_sq_weak_sequence: n >= 1");
  // route P_n = (1 - 1/n) delta_0 + (1/n) delta_n vs delta_0 through the
  // generic discrete path so both agree to the last bit
  const double x = static_cast<double>(n);
  const Measure Pn = n == 1 ? Measure::dirac(x)
                            : Measure::discrete1({{0.0, 1.0 - 1.0 / x}, {x, 1.0 / x}});
  return gamma_sq_discrete(k, Pn, Measure::dirac(0.0)).gamma_sq;
}

MMDResult gamma_sq_density(const Kernel& k, const Measure& P, const Measure& Q, int n) {
  const double coarse = gamma_sq_rules(k, P, Q, n);
  const double fine = gamma_sq_rules(k, P, Q, 2 * n);
  return make_result(fine, MMDResult::Path::DensityQuadrature, std::abs(fine - coarse));
}

MMDResult gamma_sq_spectral(const Kernel& k, const Measure& P, const Measure& Q,
                            double abs_tol) {
  if (k.dim() != 1) throw unsupported_error("gamma_sq_spectral: 1-D kernels only");
  if (!P.has_char() || !Q.has_char())
    throw unsupported_error("gamma_sq_spectral: measures lack characteristic functions");
  const SpectrumInfo sp = k.spectrum();
  if (!sp.evaluable) {
    const auto parts = k.summands();
    if (parts.empty())
      throw unsupported_error("gamma_sq_spectral: spectrum not evaluable");
    double g = 0.0, e = 0.0;
    for (const auto& part : parts) {
      const MMDResult r = gamma_sq_spectral(*part, P, Q, abs_tol / parts.size());
      g += r.gamma_sq;
      e += r.err_estimate;
    }
    return make_result(g, MMDResult::Path::SpectralQuadrature, e);
  }
  if (sp.kind == SpectrumInfo::Kind::TorusCoefficients)
    throw unsupported_error("gamma_sq_spectral: use gamma_sq_torus for torus kernels");

  if (sp.kind == SpectrumInfo::Kind::Lattice) {
    double acc = 0.0;
    for (const auto& [loc, wgt] : sp.atoms)
      acc += wgt * std::norm(P.char_function(loc) - Q.char_function(loc));
    return make_result(acc, MMDResult::Path::SpectralQuadrature);
  }

  // continuous density: (2pi)^{-1/2} \int |dphi|^2 psihat dw
  const double V = P.variation_bound() + Q.variation_bound();
  double W, tail_err;
  if (sp.cutoff < INF) {
    W = sp.cutoff;
    tail_err = 0.0;
  } else {
    W = 50.0;
    auto bound = [&](double w) {
      const double dphi_sq = std::isfinite(V) ? std::min(4.0, (V / w) * (V / w)) : 4.0;
      return dphi_sq * sp.tail_mass(w) / SQRT_TWO_PI;
    };
    while (bound(W) > 0.5 * abs_tol && W < 1e8) W *= 2.0;
    tail_err = bound(W);
  }
  auto f = [&](double w) {
    return sp.density(w) * std::norm(P.char_function(w) - Q.char_function(w)) /
           SQRT_TWO_PI;
  };
  // integrate panel by panel: a narrow bump (the characteristic-function
  // difference of a concentrated measure sits near one frequency) can fall
  // between the nodes of a single adaptive pass over the whole range
  const double panel_w = 2.0, dense_end = std::min(W, 1024.0);
  int n_panels = static_cast<int>(std::ceil(dense_end / panel_w));
  for (double x = dense_end; x < W; x *= 2.0) ++n_panels;
  const double panel_tol = 0.25 * abs_tol / std::max(1, n_panels);
  double val = 0.0, err = 0.0;
  double lo = 0.0;
  while (lo < W) {
    const double hi = lo < dense_end ? std::min(lo + panel_w, W)
                                     : std::min(2.0 * lo, W);
    const QuadResult q = integrate(f, lo, hi, panel_tol);
    val += q.value;
    err += q.err;
    lo = hi;
  }
  // real measures: |dphi(-w)| = |dphi(w)| and psihat is even
  return make_result(2.0 * val, MMDResult::Path::SpectralQuadrature,
                     2.0 * err + tail_err);
}

MMDResult gamma_sq_torus(const TorusKernel& k, const Measure& P, const Measure& Q, int N) {
  if (!P.on_torus() || !Q.on_torus())
    throw unsupported_error("gamma_sq_torus: both measures must live on the torus");
  const int d = k.dim();
  if (P.dim() != d || Q.dim() != d)
    throw validation_error("gamma_sq_torus: dimension mismatch");
  double acc = 0.0;
  Eigen::VectorXi n = Eigen::VectorXi::Constant(d, -N);
  while (true) {
    const double a = k.coeff(n);
    if (a > 0.0)
      acc += a * std::norm(P.torus_fourier_coeff(n) - Q.torus_fourier_coeff(n));
    int j = 0;
    for (; j < d; ++j) {
      if (n[j] < N) {
        ++n[j];
        break;
      }
      n[j] = -N;
    }
    if (j == d) break;
  }
  const double scale = std::pow(TWO_PI, 2 * d);
  // |A_P(n)| <= (2pi)^{-d}, so |dA|^2 <= 4 (2pi)^{-2d}
  return make_result(scale * acc, MMDResult::Path::TorusSeries, 4.0 * k.tail(N));
}

MMDResult gamma_sq_closed_gaussian(double sigma_k, const Measure& P, const Measure& Q) {
  if (sigma_k <= 0) throw validation_error("gamma_sq_closed_gaussian: sigma_k > 0");
  const auto [a, u] = P.gaussian_params();
  const auto [b, v] = Q.gaussian_params();
  static std::once_flag checked;
  std::call_once(checked, [] {
    const double closed = gaussian_cross_term(0.8, 0.1, 1.0, -0.4, 1.3);
    const KernelPtr gk = make_gaussian(0.8);
    const Side s1 = make_side(Measure::gaussian(0.1, 1.0), 1024);
    const Side s2 = make_side(Measure::gaussian(-0.4, 1.3), 1024);
    if (std::abs(closed - bilinear(*gk, s1, s2)) > 1e-8)
      throw numerical_error("gaussian convolution identity failed its self-test");
  });
  const double g = gaussian_cross_term(sigma_k, a, u, a, u) +
                   gaussian_cross_term(sigma_k, b, v, b, v) -
                   2.0 * gaussian_cross_term(sigma_k, a, u, b, v);
  return make_result(g, MMDResult::Path::ClosedForm);
}

MMDResult gamma_sq_auto(const Kernel& k, const Measure& P, const Measure& Q) {
  if (k.on_torus()) {
    const auto* tk = dynamic_cast<const TorusKernel*>(&k);
    if (!tk) throw unsupported_error("gamma_sq_auto: unknown torus kernel type");
    return gamma_sq_torus(*tk, P, Q);
  }
  if (P.on_torus() || Q.on_torus())
    throw unsupported_error("gamma_sq_auto: torus measures need a torus kernel");
  if (P.is_discrete() && Q.is_discrete()) return gamma_sq_discrete(k, P, Q);
  if (k.dim() == 1 && k.translation_invariant() && P.has_char() && Q.has_char()) {
    try {
      return gamma_sq_spectral(k, P, Q);
    } catch (const unsupported_error&) {
      // fall through to quadrature
    }
  }
  return gamma_sq_density(k, P, Q);
}

MMDResult mmd_u_statistic(const Kernel& k, const Sample& X, const Sample& Y) {
  const auto& x = X.points;
  const auto& y = Y.points;
  const int m = static_cast<int>(x.size()), n = static_cast<int>(y.size());
  if (m < 2 || n < 2) throw validation_error("mmd_u_statistic: need >= 2 points per sample");
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) sxx += k(x[i], x[j]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) syy += k(y[i], y[j]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) sxy += k(x[i], y[j]);
  const double g = sxx / (double(m) * (m - 1)) + syy / (double(n) * (n - 1)) -
                   2.0 * sxy / (double(m) * n);
  return make_result(g, MMDResult::Path::UStatistic);
}

MMDResult mmd_v_statistic(const Kernel& k, const Sample& X, const Sample& Y) {
  const auto& x = X.points;
  const auto& y = Y.points;
  const int m = static_cast<int>(x.size()), n = static_cast<int>(y.size());
  if (m < 1 || n < 1) throw validation_error("mmd_v_statistic: empty sample");
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sxx += k(x[i], x[j]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) syy += k(y[i], y[j]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) sxy += k(x[i], y[j]);
  const double g = sxx / (double(m) * m) + syy / (double(n) * n) -
                   2.0 * sxy / (double(m) * n);
  return make_result(g, MMDResult::Path::VStatistic);
}

SupResult gamma_sup_bandwidth(const std::function<KernelPtr(double)>& family,
                              const Measure& P, const Measure& Q,
                              double lo, double hi, int grid_points) {
  if (!(lo > 0 && hi > lo)) throw validation_error("gamma_sup_bandwidth: need 0 < lo < hi");
  if (grid_points < 3) throw validation_error("gamma_sup_bandwidth: need >= 3 grid points");
  auto value = [&](double s) { return gamma_sq_auto(*family(s), P, Q).gamma_sq; };
  const double llo = std::log(lo), lhi = std::log(hi);
  double best_s = lo, best_g = -INF;
  int best_i = 0;
  std::vector<double> g(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double s = std::exp(llo + (lhi - llo) * i / (grid_points - 1));
    g[i] = value(s);
    if (g[i] > best_g) {
      best_g = g[i];
      best_s = s;
      best_i = i;
    }
  }
  // golden-section refinement on log-bandwidth around the grid maximum
  const double step = (lhi - llo) / (grid_points - 1);
  double a = llo + step * std::max(0, best_i - 1);
  double b = llo + step * std::min(grid_points - 1, best_i + 1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = value(std::exp(c)), fd = value(std::exp(d));
  for (int it = 0; it < 40 && b - a > 1e-10; ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = value(std::exp(c));
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = value(std::exp(d));
    }
  }
  const double s_star = std::exp(0.5 * (a + b));
  const double g_star = value(s_star);
  if (g_star > best_g) {
    best_g = g_star;
    best_s = s_star;
  }
  SupResult out;
  out.gamma_sq = best_g;
  out.gamma = std::sqrt(std::max(best_g, 0.0));
  out.best = family(best_s)->describe();
  out.best_param = best_s;
  return out;
}

SupResult gamma_sup_convex(const std::vector<KernelPtr>& kernels,
                           const Measure& P, const Measure& Q) {
  if (kernels.empty()) throw validation_error("gamma_sup_convex: empty family");
  SupResult out;
  out.gamma_sq = -INF;
  for (size_t i = 0; i < kernels.size(); ++i) {
    const double g = gamma_sq_auto(*kernels[i], P, Q).gamma_sq;
    if (g > out.gamma_sq) {
      out.gamma_sq = g;
      out.best = kernels[i]->describe();
      out.best_param = static_cast<double>(i);
    }
  }
  out.gamma = std::sqrt(std::max(out.gamma_sq, 0.0));
  return out;
}

double kernel_on_measures(const Kernel& k, const Measure& P, const Measure& Q) {
  return bilinear(k, make_side(P, 1024), make_side(Q, 1024));
}

double gaussian_kernel_on_measures(const Kernel& k, double sigma,
                                   const Measure& P, const Measure& Q) {
  if (sigma <= 0) throw validation_error("gaussian_kernel_on_measures: sigma > 0");
  return std::exp(-sigma * gamma_sq_auto(k, P, Q).gamma_sq);
}

}  // namespace kdist
