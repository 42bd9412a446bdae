#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"

namespace kdist {

// W(P,Q) = \int |F_P - F_Q| dx (1-D closed form). Exact for discrete pairs;
// adaptive quadrature with tail accounting otherwise.
double wasserstein_1d(const Measure& P, const Measure& Q, double* err = nullptr);

// Exact optimal transport between finite discrete measures under a metric
// cost, solved as min-cost flow on the bipartite support graph (successive
// shortest paths; masses scaled to integers at 1e12). Throws numerical_error
// if the primal/dual gap exceeds 1e-9.
double wasserstein_discrete(const Measure& P, const Measure& Q,
                            const std::function<double(const Eigen::VectorXd&,
                                                       const Eigen::VectorXd&)>& rho);

// Total variation in the range-[0,2] convention: sum |p_i - q_i| over union
// atoms, or \int |p - q| for density pairs.
double tv(const Measure& P, const Measure& Q);

// Dudley (bounded-Lipschitz) metric between finite discrete measures:
// sup { sum f_i (p_i - q_i) : Lip_rho(f) + ||f||_inf <= 1 }, solved exactly
// through its transport dual (move mass at the Lipschitz rate or destroy and
// recreate it at the sup-norm rate) with a concave line search over the
// budget split.
double dudley_discrete(const Measure& P, const Measure& Q,
                       const std::function<double(const Eigen::VectorXd&,
                                                  const Eigen::VectorXd&)>& rho);

// inf over couplings of \int\int ||k(.,x)-k(.,y)||_H dmu = transport LP with
// the Hilbertian cost; an upper bound on gamma_k.
double coupling_upper_bound(const Kernel& k, const Measure& P, const Measure& Q);

struct MetricReport {
  double gamma = 0.0;
  double gamma_sq = 0.0;
  std::optional<double> wasserstein;
  std::optional<double> tv;
  std::optional<double> dudley;
  std::optional<double> coupling_bound;
  double bound_C = 0.0;  // sup_x k(x,x)
  struct Check {
    std::string id;
    double lhs = 0.0, rhs = 0.0;
    bool pass = false;  // lhs <= rhs + 1e-9
  };
  std::vector<Check> checks;
  bool all_pass() const;
};

// Computes gamma, W, TV, beta (all in the Hilbertian metric rho~ where a
// metric is needed) on a discrete pair and checks the five comparison
// inequalities plus the coupling bound.
MetricReport check_comparison_inequalities(const Kernel& k, const Measure& P, const Measure& Q);

// Rows of the weak-convergence table for P_n = (1-1/n) d_0 + (1/n) d_n vs d_0.
struct WeakRow {
  int n = 0;
  double gamma_sq = 0.0;
  double wasserstein = 0.0;
  double tv = 0.0;
};
struct WeakTable {
  std::vector<WeakRow> rows;
  enum class Metrizes { Yes, No, Unknown };
  Metrizes metrizes = Metrizes::Unknown;
  int witness_l = 0;  // smallest l for which the integrability predicate holds
  std::string note;
};
WeakTable weak_convergence_table(const Kernel& k, const std::vector<int>& n_values);

// Integrability predicate \int dw / (psihat(w) (1+|w|)^l) < infinity,
// evaluated numerically for l = 1..l_max; returns the smallest l that
// converges, or nullopt.
std::optional<int> weak_topology_predicate(const Kernel& k, int l_max = 8);

}  // namespace kdist
