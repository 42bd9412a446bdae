#include "kdist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include "kdist/mmd.hpp"
#include "kdist/quadrature.hpp"

namespace kdist {
namespace {

// ---------------------------------------------------------------- W (1-D)

double wasserstein_discrete_1d(const Measure& P, const Measure& Q) {
  std::vector<double> xs;
  for (const auto& a : P.atoms()) xs.push_back(a[0]);
  for (const auto& a : Q.atoms()) xs.push_back(a[0]);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double w = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    w += std::abs(P.cdf(xs[i]) - Q.cdf(xs[i])) * (xs[i + 1] - xs[i]);
  return w;
}

// \int_R^inf (1 - F) dx; nullopt when it diverges (Cauchy tails).
std::optional<double> tail_above(const Measure& M, double R) {
  switch (M.kind()) {
    case Measure::Kind::Discrete: {
      double acc = 0.0;
      for (size_t i = 0; i < M.atoms().size(); ++i)
        if (M.atoms()[i][0] > R) acc += M.weights()[i] * (M.atoms()[i][0] - R);
      return acc;
    }
    case Measure::Kind::Gaussian: {
      const auto [mu, s] = M.gaussian_params();
      const double z = (R - mu) / s;
      const double phi = std::exp(-0.5 * z * z) / SQRT_TWO_PI;
      return s * (phi - z * (1.0 - normal_cdf(z)));
    }
    case Measure::Kind::Cauchy:
      return std::nullopt;
    case Measure::Kind::CauchyPower: {
      // 1 - F(x) <= C_l x^{1-2l} / (2l - 1), integrable for l >= 2
      const double c = M.density(0.0);  // C_l
      // recover l from the density ratio at x = 1: d(1) = C / 2^l
      const int l = static_cast<int>(std::round(std::log2(c / M.density(1.0))));
      if (l < 2) return std::nullopt;
      if (R <= 1.0) return std::nullopt;  // bound only valid in the tail
      return c / ((2.0 * l - 1.0) * (2.0 * l - 2.0) * std::pow(R, 2.0 * l - 2.0));
    }
    case Measure::Kind::Perturbed: {
      // tail within the support of the (compact or light-tailed) base
      auto [lo, hi] = M.support();
      (void)lo;
      return R >= hi ? std::optional<double>(0.0) : std::nullopt;
    }
    default: {
      auto [lo, hi] = M.support();
      (void)lo;
      if (R >= hi) return 0.0;
      return std::nullopt;
    }
  }
}

std::optional<double> tail_below(const Measure& M, double R) {
  // \int_{-inf}^R F dx, by the symmetry of the representations handled above
  switch (M.kind()) {
    case Measure::Kind::Discrete: {
      double acc = 0.0;
      for (size_t i = 0; i < M.atoms().size(); ++i)
        if (M.atoms()[i][0] < R) acc += M.weights()[i] * (R - M.atoms()[i][0]);
      return acc;
    }
    case Measure::Kind::Gaussian: {
      const auto [mu, s] = M.gaussian_params();
      const double z = (mu - R) / s;
      const double phi = std::exp(-0.5 * z * z) / SQRT_TWO_PI;
      return s * (phi - z * (1.0 - normal_cdf(z)));
    }
    case Measure::Kind::Cauchy:
      return std::nullopt;
    case Measure::Kind::CauchyPower:
      return tail_above(M, -R);  // symmetric density
    default: {
      auto [lo, hi] = M.support();
      (void)hi;
      if (R <= lo) return 0.0;
      return std::nullopt;
    }
  }
}

// effective interval for the gap integral (much tighter than support() for
// heavy tails, whose remainder is accounted analytically)
std::pair<double, double> gap_hull(const Measure& M) {
  switch (M.kind()) {
    case Measure::Kind::Discrete:
      return M.support();
    case Measure::Kind::CauchyPower: {
      const double c = M.density(0.0);
      const int l = static_cast<int>(std::round(std::log2(c / M.density(1.0))));
      const double R =
          l >= 2 ? std::pow(c / ((2.0 * l - 1.0) * (2.0 * l - 2.0) * 1e-10),
                            1.0 / (2.0 * l - 2.0))
                 : 1e6;
      return {-R, R};
    }
    default:
      return M.support();
  }
}

}  // namespace

double wasserstein_1d(const Measure& P, const Measure& Q, double* err) {
  if (P.dim() != 1 || Q.dim() != 1)
    throw unsupported_error("wasserstein_1d: 1-D measures only");
  if (P.is_discrete() && Q.is_discrete()) {
    if (err) *err = 0.0;
    return wasserstein_discrete_1d(P, Q);
  }

  // Cauchy tails: the gap integral converges only when they cancel
  if (P.kind() == Measure::Kind::Cauchy || Q.kind() == Measure::Kind::Cauchy) {
    if (P.kind() != Q.kind())
      throw unsupported_error("wasserstein_1d: Cauchy tail does not cancel");
    const auto [x1, g1] = P.cauchy_params();
    const auto [x2, g2] = Q.cauchy_params();
    if (std::abs(g1 - g2) > 1e-12)
      throw unsupported_error("wasserstein_1d: Cauchy scales differ, W diverges");
    // equal-scale location shift: F_P - F_Q keeps one sign and integrates to
    // the shift, so W is exactly |x1 - x2|
    if (err) *err = 0.0;
    return std::abs(x1 - x2);
  }

  const auto [pa, pb] = gap_hull(P);
  const auto [qa, qb] = gap_hull(Q);
  const double A = std::min(pa, qa), B = std::max(pb, qb);
  const auto ta = tail_above(P, B), tb = tail_above(Q, B);
  const auto ua = tail_below(P, A), ub = tail_below(Q, A);
  if (!ta || !tb || !ua || !ub)
    throw unsupported_error("wasserstein_1d: no finite tail bound for this pair");
  QuadResult q = integrate(
      [&](double x) { return std::abs(P.cdf(x) - Q.cdf(x)); }, A, B, 1e-9);
  const double tail = *ta + *tb + *ua + *ub;
  if (err) *err = q.err + tail;
  return q.value;
}

// ------------------------------------------------ discrete transport (MCMF)

namespace {

struct FlowEdge {
  int to;
  long long cap;
  double cost;
  int rev;
};

class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : g_(n) {}
  void add(int u, int v, long long cap, double cost) {
    g_[u].push_back({v, cap, cost, static_cast<int>(g_[v].size())});
    g_[v].push_back({u, 0, -cost, static_cast<int>(g_[u].size()) - 1});
  }
  // sends `flow` units from s to t; returns total cost
  double run(int s, int t, long long flow) {
    double total = 0.0;
    const int n = static_cast<int>(g_.size());
    while (flow > 0) {
      // Bellman-Ford (residual arcs can be negative)
      std::vector<double> dist(n, INF);
      std::vector<int> pv(n, -1), pe(n, -1);
      std::vector<bool> inq(n, false);
      std::deque<int> dq{s};
      dist[s] = 0.0;
      inq[s] = true;
      while (!dq.empty()) {
        const int u = dq.front();
        dq.pop_front();
        inq[u] = false;
        for (int i = 0; i < static_cast<int>(g_[u].size()); ++i) {
          const FlowEdge& e = g_[u][i];
          if (e.cap > 0 && dist[u] + e.cost < dist[e.to] - 1e-15) {
            dist[e.to] = dist[u] + e.cost;
            pv[e.to] = u;
            pe[e.to] = i;
            if (!inq[e.to]) {
              dq.push_back(e.to);
              inq[e.to] = true;
            }
          }
        }
      }
      if (dist[t] == INF)
        throw numerical_error("transport: no augmenting path (mass imbalance)");
      long long push = flow;
      for (int v = t; v != s; v = pv[v]) push = std::min(push, g_[pv[v]][pe[v]].cap);
      for (int v = t; v != s; v = pv[v]) {
        FlowEdge& e = g_[pv[v]][pe[v]];
        e.cap -= push;
        g_[v][e.rev].cap += push;
      }
      total += dist[t] * static_cast<double>(push);
      flow -= push;
    }
    return total;
  }
  // optimality: no negative cycle in the residual graph
  bool optimal() const {
    const int n = static_cast<int>(g_.size());
    std::vector<double> d(n, 0.0);
    for (int it = 0; it < n; ++it) {
      bool changed = false;
      for (int u = 0; u < n; ++u)
        for (const FlowEdge& e : g_[u])
          if (e.cap > 0 && d[u] + e.cost < d[e.to] - 1e-12) {
            d[e.to] = d[u] + e.cost;
            changed = true;
          }
      if (!changed) return true;
    }
    return false;
  }

 private:
  std::vector<std::vector<FlowEdge>> g_;
};

constexpr long long MASS_SCALE = 1000000000000LL;  // 1e12

std::vector<long long> scaled_masses(const std::vector<double>& w) {
  std::vector<long long> out(w.size());
  long long total = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    out[i] = std::llround(w[i] * MASS_SCALE);
    total += out[i];
  }
  // absorb rounding drift into the largest atom
  const auto mx = std::max_element(out.begin(), out.end());
  *mx += MASS_SCALE - total;
  if (*mx < 0) throw numerical_error("transport: mass scaling failed");
  return out;
}

}  // namespace

double wasserstein_discrete(const Measure& P, const Measure& Q,
                            const std::function<double(const Eigen::VectorXd&,
                                                       const Eigen::VectorXd&)>& rho) {
  if (!P.is_discrete() || !Q.is_discrete())
    throw unsupported_error("wasserstein_discrete: discrete measures only");
  const auto& xp = P.atoms();
  const auto& xq = Q.atoms();
  const int m = static_cast<int>(xp.size()), n = static_cast<int>(xq.size());
  const std::vector<long long> a = scaled_masses(P.weights());
  const std::vector<long long> b = scaled_masses(Q.weights());

  const int S = m + n, T = m + n + 1;
  MinCostFlow mcf(m + n + 2);
  for (int i = 0; i < m; ++i) mcf.add(S, i, a[i], 0.0);
  for (int j = 0; j < n; ++j) mcf.add(m + j, T, b[j], 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) mcf.add(i, m + j, MASS_SCALE, rho(xp[i], xq[j]));
  const double cost = mcf.run(S, T, MASS_SCALE);
  if (!mcf.optimal())
    throw numerical_error("transport: residual graph admits an improving cycle");
  return cost / static_cast<double>(MASS_SCALE);
}

// ------------------------------------------------------------------- TV

double tv(const Measure& P, const Measure& Q) {
  if (P.is_discrete() && Q.is_discrete()) {
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
    for (double v : mu) acc += std::abs(v);
    return acc;
  }
  if (P.is_discrete() != Q.is_discrete()) return 2.0;  // mutually singular
  if (P.on_torus() && Q.on_torus()) {
    if (P.dim() != 1) throw unsupported_error("tv: torus quadrature only for d=1");
    QuadResult q = integrate(
        [&](double x) {
          Eigen::VectorXd v(1);
          v << x;
          return std::abs(P.density(v) - Q.density(v));
        },
        0.0, TWO_PI, 1e-10);
    return q.value;
  }
  const auto [pa, pb] = P.support();
  const auto [qa, qb] = Q.support();
  const double A = std::min(pa, qa), B = std::max(pb, qb);
  QuadResult q = integrate(
      [&](double x) { return std::abs(P.density(x) - Q.density(x)); }, A, B, 1e-10);
  return q.value;
}

// ---------------------------------------------------------------- Dudley

double dudley_discrete(const Measure& P, const Measure& Q,
                       const std::function<double(const Eigen::VectorXd&,
                                                  const Eigen::VectorXd&)>& rho) {
  if (!P.is_discrete() || !Q.is_discrete())
    throw unsupported_error("dudley_discrete: discrete measures only");
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
  // split mu into its positive and negative parts
  std::vector<Eigen::VectorXd> xp, xq;
  std::vector<double> wp, wq;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (mu[i] > 1e-15) {
      xp.push_back(pts[i]);
      wp.push_back(mu[i]);
    } else if (mu[i] < -1e-15) {
      xq.push_back(pts[i]);
      wq.push_back(-mu[i]);
    }
  }
  if (xp.empty() || xq.empty()) return 0.0;
  double M = 0.0, Mq = 0.0;
  for (double w : wp) M += w;
  for (double w : wq) Mq += w;
  for (double& w : wp) w /= M;
  for (double& w : wq) w /= Mq;

  const int np = static_cast<int>(xp.size()), nq = static_cast<int>(xq.size());
  Eigen::MatrixXd R(np, nq);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nq; ++j) R(i, j) = rho(xp[i], xq[j]);
  const std::vector<long long> a = scaled_masses(wp);
  const std::vector<long long> b = scaled_masses(wq);

  // inner problem at a fixed budget split t:
  //   V(t) = max { sum mu_i f(x_i) : Lip_rho(f) <= t, ||f||_inf <= 1 - t }.
  // By LP duality this is a min-cost transport of mu+ onto mu- where a unit
  // either moves from x_i to x_j at cost t rho_ij or is destroyed at x_i and
  // recreated at x_j at cost (1 - t) each, i.e. edge cost
  // min(t rho_ij, 2 (1 - t)).
  auto value = [&](double t) {
    const int S = np + nq, T = np + nq + 1;
    MinCostFlow mcf(np + nq + 2);
    for (int i = 0; i < np; ++i) mcf.add(S, i, a[i], 0.0);
    for (int j = 0; j < nq; ++j) mcf.add(np + j, T, b[j], 0.0);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < nq; ++j)
        mcf.add(i, np + j, MASS_SCALE, std::min(t * R(i, j), 2.0 * (1.0 - t)));
    return M * mcf.run(S, T, MASS_SCALE) / static_cast<double>(MASS_SCALE);
  };

  // V is a pointwise minimum of concave (min-of-linear) plan costs, hence
  // concave in t: golden-section maximization over the split t in [0, 1]
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double t1 = hi - gr * (hi - lo), t2 = lo + gr * (hi - lo);
  double f1 = value(t1), f2 = value(t2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = t1;
      t1 = t2;
      f1 = f2;
      t2 = lo + gr * (hi - lo);
      f2 = value(t2);
    } else {
      hi = t2;
      t2 = t1;
      f2 = f1;
      t1 = hi - gr * (hi - lo);
      f1 = value(t1);
    }
  }
  return std::max(f1, f2);
}

double coupling_upper_bound(const Kernel& k, const Measure& P, const Measure& Q) {
  return wasserstein_discrete(P, Q, [&k](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return hilbertian_distance(k, x, y);
  });
}

// --------------------------------------------------------------- reports

bool MetricReport::all_pass() const {
  for (const auto& ch : checks)
    if (!ch.pass) return false;
  return true;
}

MetricReport check_comparison_inequalities(const Kernel& k, const Measure& P, const Measure& Q) {
  if (!P.is_discrete() || !Q.is_discrete())
    throw unsupported_error("check_comparison_inequalities: discrete measures only");
  const auto C = k.bound();
  if (!C) throw unsupported_error("check_comparison_inequalities: kernel is unbounded");
  MetricReport rep;
  rep.bound_C = *C;
  const MMDResult g = gamma_sq_discrete(k, P, Q);
  rep.gamma_sq = g.gamma_sq;
  rep.gamma = g.gamma;
  auto rho = [&k](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return hilbertian_distance(k, x, y);
  };
  rep.wasserstein = wasserstein_discrete(P, Q, rho);
  rep.dudley = dudley_discrete(P, Q, rho);
  rep.tv = tv(P, Q);
  rep.coupling_bound = *rep.wasserstein;  // same transport cost

  auto add = [&rep](const std::string& id, double lhs, double rhs) {
    rep.checks.push_back({id, lhs, rhs, lhs <= rhs + 1e-9});
  };
  const double sC = std::sqrt(*C);
  add("gamma <= W(rho~)", rep.gamma, *rep.wasserstein);
  add("W(rho~) <= sqrt(gamma^2 + 4C)", *rep.wasserstein,
      std::sqrt(rep.gamma_sq + 4.0 * *C));
  add("gamma/(1+sqrt(C)) <= beta(rho~)", rep.gamma / (1.0 + sC), *rep.dudley);
  add("beta(rho~) <= 2 (gamma^2 + 4C)^{1/3}", *rep.dudley,
      2.0 * std::cbrt(rep.gamma_sq + 4.0 * *C));
  add("gamma <= sqrt(C) TV", rep.gamma, sC * *rep.tv);
  add("gamma <= coupling bound", rep.gamma, *rep.coupling_bound);
  return rep;
}

WeakTable weak_convergence_table(const Kernel& k, const std::vector<int>& n_values) {
  WeakTable table;
  for (int n : n_values) {
    WeakRow row;
    row.n = n;
    row.gamma_sq = gamma_sq_weak_sequence(k, n);
    row.wasserstein = 1.0;  // mass 1/n transported distance n
    row.tv = 2.0 / n;
    table.rows.push_back(row);
  }
  try {
    const auto l = weak_topology_predicate(k);
    if (l) {
      table.metrizes = WeakTable::Metrizes::Yes;
      table.witness_l = *l;
      table.note = "integrability predicate holds at l=" + std::to_string(*l);
    } else {
      table.metrizes = WeakTable::Metrizes::Unknown;
      table.note = "integrability predicate fails for all scanned l";
    }
  } catch (const unsupported_error& e) {
    if (k.classify().verdict == Classification::Verdict::NotCharacteristic) {
      table.metrizes = WeakTable::Metrizes::No;
      table.note = "kernel is not characteristic";
    } else {
      table.metrizes = WeakTable::Metrizes::Unknown;
      table.note = e.what();
    }
  }
  return table;
}

std::optional<int> weak_topology_predicate(const Kernel& k, int l_max) {
  const SpectrumInfo sp = k.spectrum();
  if (sp.kind != SpectrumInfo::Kind::ContinuousDensity || !sp.evaluable)
    throw unsupported_error("weak_topology_predicate: needs a continuous spectral density");
  if (sp.cutoff < INF) return std::nullopt;  // 1/psihat blows up past the cutoff
  for (int l = 1; l <= l_max; ++l) {
    auto f = [&sp, l](double w) {
      const double d = sp.density(w);
      if (!(d > 1e-300)) return 1e300;
      const double v = 1.0 / (d * std::pow(1.0 + std::abs(w), l));
      return std::min(v, 1e300);
    };
    // relative tolerances: the integrand can be astronomically large, so an
    // absolute target would recurse forever
    auto block = [&f](double a, double b) {
      double scale = 0.0;
      for (int i = 0; i <= 32; ++i) scale = std::max(scale, f(a + (b - a) * i / 32.0));
      return integrate(f, a, b, std::max(1e-12, 1e-8 * scale * (b - a)), 24).value;
    };
    double sum = block(0.0, 10.0);
    if (!std::isfinite(sum) || sum > 1e50) continue;
    double W = 10.0, prevT = INF;
    bool convergent = false, divergent = false;
    for (int j = 0; j < 60; ++j) {
      const double T = block(W, 2.0 * W);
      if (!std::isfinite(T) || T > 1e50) {
        divergent = true;
        break;
      }
      if (j > 2 && T > 0.95 * prevT) {
        divergent = true;  // ratio test: blocks not geometrically decreasing
        break;
      }
      sum += T;
      if (T < 1e-12 * (1.0 + sum)) {
        convergent = true;
        break;
      }
      prevT = T;
      W *= 2.0;
    }
    if (convergent && !divergent) return l;
  }
  return std::nullopt;
}

}  // namespace kdist
