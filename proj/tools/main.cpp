// kdist command-line front end: population and empirical kernel distances,
// kernel classification, zero-distance constructions, metric comparisons,
// weak-convergence tables, two-sample tests, and the bandwidth-sweep data.
#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "kdist/constructions.hpp"
#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"
#include "kdist/metrics.hpp"
#include "kdist/mmd.hpp"
#include "kdist/parse.hpp"
#include "kdist/twosample.hpp"

using json = nlohmann::ordered_json;
using namespace kdist;

namespace {

std::ostream* g_out = &std::cout;
std::ofstream g_file;

void set_output(const std::string& path) {
  if (path.empty()) return;
  g_file.open(path);
  if (!g_file) throw validation_error("cannot open output file '" + path + "'");
  g_out = &g_file;
}

void emit(const json& j) { *g_out << j.dump(2) << "\n"; }

json mmd_json(const MMDResult& r) {
  return json{{"gamma_sq", r.gamma_sq},
              {"gamma", r.gamma},
              {"path", to_string(r.path)},
              {"err_estimate", r.err_estimate}};
}

MMDResult run_gamma(const std::string& path, const Kernel& k, const Measure& P,
                    const Measure& Q) {
  if (path == "auto") return gamma_sq_auto(k, P, Q);
  if (path == "discrete") return gamma_sq_discrete(k, P, Q);
  if (path == "density") return gamma_sq_density(k, P, Q);
  if (path == "spectral") return gamma_sq_spectral(k, P, Q);
  if (path == "torus") {
    const auto* tk = dynamic_cast<const TorusKernel*>(&k);
    if (!tk) throw validation_error("path torus needs a torus kernel");
    return gamma_sq_torus(*tk, P, Q);
  }
  if (path == "closed") {
    // closed form exists for the Gaussian kernel between Gaussian measures
    const auto call = k.describe();
    if (call.rfind("gaussian(", 0) != 0)
      throw validation_error("path closed needs a gaussian kernel");
    const double sigma = std::stod(call.substr(9));
    return gamma_sq_closed_gaussian(sigma, P, Q);
  }
  throw validation_error("unknown path '" + path + "'");
}

std::vector<double> parse_grid(const std::string& spec) {
  // "a:b:step" inclusive grid
  std::vector<double> out;
  std::istringstream is(spec);
  std::string sa, sb, ss;
  if (!std::getline(is, sa, ':') || !std::getline(is, sb, ':') || !std::getline(is, ss))
    throw validation_error("grid spec must be start:stop:step");
  const double a = std::stod(sa), b = std::stod(sb), step = std::stod(ss);
  if (!(step > 0) || b < a) throw validation_error("bad grid spec '" + spec + "'");
  const int n = static_cast<int>(std::floor((b - a) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(a + i * step);
  return out;
}

std::pair<int, int> parse_range(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots == std::string::npos) throw validation_error("range spec must be a..b");
  return {std::stoi(spec.substr(0, dots)), std::stoi(spec.substr(dots + 2))};
}

Measure perturbed_or_base(const Measure& base, double alpha, double nu) {
  return std::abs(nu) < 1e-12 ? base : Measure::perturbed(base, alpha, nu);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel distances between probability measures"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);

  std::string kspec, pspec, qspec, out_path, format = "json";
  std::uint64_t seed = 1;

  // ---- gamma
  auto* gamma = app.add_subcommand("gamma", "population distance gamma_k(P,Q)");
  std::string gpath = "auto";
  gamma->add_option("-k,--kernel", kspec, "kernel spec")->required();
  gamma->add_option("-p,--measure-p", pspec, "first measure")->required();
  gamma->add_option("-q,--measure-q", qspec, "second measure")->required();
  gamma->add_option("--path", gpath, "auto|discrete|density|spectral|torus|closed");
  gamma->add_option("--out", out_path, "write output here instead of stdout");

  // ---- estimate
  auto* est = app.add_subcommand("estimate", "empirical statistic from samples");
  int est_m = 100;
  std::string stat = "u";
  est->add_option("-k,--kernel", kspec)->required();
  est->add_option("-p,--measure-p", pspec)->required();
  est->add_option("-q,--measure-q", qspec)->required();
  est->add_option("-m,--samples", est_m, "sample size per side");
  est->add_option("--stat", stat, "u|v");
  est->add_option("--seed", seed);
  est->add_option("--out", out_path);

  // ---- classify
  auto* cls = app.add_subcommand("classify", "characteristic-kernel verdict");
  cls->add_option("-k,--kernel", kspec)->required();
  cls->add_option("--out", out_path);

  // ---- construct
  auto* con = app.add_subcommand("construct", "distinct pairs with gamma = 0");
  std::string cname;
  double tau = 2.0, beta = 3.0, alpha = 0.125, w0 = 4 * PI;
  int l = 2, Nord = 2, dim = 1, n0 = 2, grid_points = 512;
  con->add_option("name", cname, "dirichlet-uniform|sinc-cauchy|torus-flat|eigen|zero-pair")
      ->required();
  con->add_option("--tau", tau);
  con->add_option("--l", l);
  con->add_option("--beta", beta);
  con->add_option("--alpha", alpha);
  con->add_option("--N", Nord, "perturbation order (sinc-cauchy)");
  con->add_option("--w0", w0, "perturbation centre frequency (sinc-cauchy)");
  con->add_option("--d", dim, "dimension (torus-flat)");
  con->add_option("--n0", n0, "perturbed frequency (torus-flat)");
  con->add_option("--grid-points", grid_points, "grid size (eigen)");
  con->add_option("-k,--kernel", kspec, "kernel (zero-pair / eigen)");
  con->add_option("--out", out_path);

  // ---- compare
  auto* cmp = app.add_subcommand("compare", "gamma vs W, TV, Dudley with bound checks");
  cmp->add_option("-k,--kernel", kspec)->required();
  cmp->add_option("-p,--measure-p", pspec)->required();
  cmp->add_option("-q,--measure-q", qspec)->required();
  cmp->add_option("--out", out_path);

  // ---- weak
  auto* weak = app.add_subcommand("weak", "weak-convergence table for P_n vs delta_0");
  std::string nrange = "1..10";
  weak->add_option("-k,--kernel", kspec)->required();
  weak->add_option("--n", nrange, "range a..b");
  weak->add_option("--format", format, "csv|json");
  weak->add_option("--out", out_path);

  // ---- test
  auto* tst = app.add_subcommand("test", "two-sample permutation test");
  int tm = 100, B = 199;
  double level = 0.05;
  tst->add_option("-k,--kernel", kspec)->required();
  tst->add_option("-p,--measure-p", pspec)->required();
  tst->add_option("-q,--measure-q", qspec)->required();
  tst->add_option("-m,--samples", tm);
  tst->add_option("-B,--permutations", B);
  tst->add_option("--level", level);
  tst->add_option("--seed", seed);
  tst->add_option("--out", out_path);

  // ---- fig5-style bandwidth sweep over the perturbation frequency
  auto* fig5 = app.add_subcommand(
      "fig5", "mean empirical gamma_sq over a grid of perturbation frequencies");
  std::string f5_kernel = "bspline(1)", f5_base = "uniform(-1,1)", nu_grid = "0:4:0.25";
  double f5_alpha = 0.5;
  int f5_m = 250, trials = 25;
  fig5->add_option("-k,--kernel", f5_kernel);
  fig5->add_option("--base", f5_base, "base measure q");
  fig5->add_option("--alpha", f5_alpha, "perturbation amplitude");
  fig5->add_option("--nu-grid", nu_grid, "start:stop:step");
  fig5->add_option("-m,--samples", f5_m);
  fig5->add_option("--trials", trials);
  fig5->add_option("--seed", seed);
  fig5->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
    set_output(out_path);
    *g_out << std::setprecision(12);

    if (*gamma) {
      const KernelPtr k = parse_kernel(kspec);
      const Measure P = parse_measure(pspec), Q = parse_measure(qspec);
      emit(mmd_json(run_gamma(gpath, *k, P, Q)));
    } else if (*est) {
      const KernelPtr k = parse_kernel(kspec);
      const Measure P = parse_measure(pspec), Q = parse_measure(qspec);
      const Sample X = P.sample(est_m, mix_seed(seed, 1));
      const Sample Y = Q.sample(est_m, mix_seed(seed, 2));
      const MMDResult r =
          stat == "v" ? mmd_v_statistic(*k, X, Y) : mmd_u_statistic(*k, X, Y);
      json j = mmd_json(r);
      j["m"] = est_m;
      j["seed"] = seed;
      emit(j);
    } else if (*cls) {
      const KernelPtr k = parse_kernel(kspec);
      const Classification c = k->classify();
      emit(json{{"kernel", k->describe()},
                {"verdict", to_string(c.verdict)},
                {"reason", c.reason}});
    } else if (*con) {
      auto report = [&](const ConstructedPair& pair) {
        json j{{"P", pair.P.describe()},
               {"Q", pair.Q.describe()},
               {"kernel", pair.kernel ? pair.kernel->describe() : "(none)"},
               {"predicted_gamma_sq", pair.predicted_gamma_sq},
               {"tv", pair.tv},
               {"provenance", pair.provenance}};
        if (pair.kernel) {
          const MMDResult r = gamma_sq_auto(*pair.kernel, pair.P, pair.Q);
          j["gamma_sq"] = r.gamma_sq;
          j["path"] = to_string(r.path);
          j["err_estimate"] = r.err_estimate;
        }
        emit(j);
      };
      if (cname == "dirichlet-uniform") {
        report(construct_dirichlet_uniform(tau, l, beta, alpha));
      } else if (cname == "sinc-cauchy") {
        report(construct_sinc_cauchy(beta, Nord, w0, alpha));
      } else if (cname == "torus-flat") {
        Eigen::VectorXi v = Eigen::VectorXi::Zero(dim);
        v[0] = n0;
        report(construct_torus_flat(dim, v, alpha));
      } else if (cname == "zero-pair") {
        if (kspec.empty()) throw validation_error("zero-pair needs --kernel");
        report(pair_with_zero_gamma(parse_kernel(kspec)));
      } else if (cname == "eigen") {
        if (kspec.empty()) throw validation_error("eigen needs --kernel");
        const KernelPtr k = parse_kernel(kspec);
        const EigenSmallResult r =
            eigen_small_mmd(*k, parse_measure("uniform(-1,1)"), l, tau, grid_points);
        emit(json{{"predicted_gamma", r.predicted_gamma},
                  {"direct_gamma", r.direct_gamma},
                  {"err_estimate", r.err_estimate},
                  {"lambda_l", r.lambda_l},
                  {"separation", r.separation},
                  {"tv", r.pair.tv}});
      } else {
        throw validation_error("unknown construction '" + cname + "'");
      }
    } else if (*cmp) {
      const KernelPtr k = parse_kernel(kspec);
      const MetricReport rep =
          check_comparison_inequalities(*k, parse_measure(pspec), parse_measure(qspec));
      json checks = json::array();
      for (const auto& c : rep.checks)
        checks.push_back(json{{"id", c.id}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
      emit(json{{"gamma", rep.gamma},
                {"wasserstein", *rep.wasserstein},
                {"tv", *rep.tv},
                {"dudley", *rep.dudley},
                {"coupling_bound", *rep.coupling_bound},
                {"bound_C", rep.bound_C},
                {"checks", checks},
                {"all_pass", rep.all_pass()}});
    } else if (*weak) {
      const KernelPtr k = parse_kernel(kspec);
      const auto [na, nb] = parse_range(nrange);
      std::vector<int> ns;
      for (int n = na; n <= nb; ++n) ns.push_back(n);
      const WeakTable t = weak_convergence_table(*k, ns);
      if (format == "csv") {
        *g_out << "n,gamma_sq,wasserstein,tv\n";
        for (const auto& r : t.rows)
          *g_out << r.n << "," << r.gamma_sq << "," << r.wasserstein << "," << r.tv << "\n";
      } else {
        json rows = json::array();
        for (const auto& r : t.rows)
          rows.push_back(json{{"n", r.n},
                              {"gamma_sq", r.gamma_sq},
                              {"wasserstein", r.wasserstein},
                              {"tv", r.tv}});
        const char* verdict = t.metrizes == WeakTable::Metrizes::Yes ? "yes"
                              : t.metrizes == WeakTable::Metrizes::No ? "no"
                                                                      : "unknown";
        emit(json{{"rows", rows},
                  {"metrizes_weak_topology", verdict},
                  {"witness_l", t.witness_l},
                  {"note", t.note}});
      }
    } else if (*tst) {
      const KernelPtr k = parse_kernel(kspec);
      const Measure P = parse_measure(pspec), Q = parse_measure(qspec);
      const Sample X = P.sample(tm, mix_seed(seed, 1));
      const Sample Y = Q.sample(tm, mix_seed(seed, 2));
      const TestResult r = permutation_test(*k, X, Y, B, level, seed);
      emit(json{{"statistic", r.statistic},
                {"p_value", r.p_value},
                {"permutations", r.permutations},
                {"reject", r.reject},
                {"level", r.level},
                {"seed", r.seed}});
    } else if (*fig5) {
      const KernelPtr k = parse_kernel(f5_kernel);
      const Measure base = parse_measure(f5_base);
      *g_out << "nu,mean_gamma_sq_u,stderr\n";
      std::uint64_t stream = 0;
      for (double nu : parse_grid(nu_grid)) {
        const Measure P = perturbed_or_base(base, f5_alpha, nu);
        double sum = 0.0, sum_sq = 0.0;
        for (int t = 0; t < trials; ++t) {
          const Sample X = P.sample(f5_m, mix_seed(seed, ++stream));
          const Sample Y = base.sample(f5_m, mix_seed(seed, ++stream));
          const double g = mmd_u_statistic(*k, X, Y).gamma_sq;
          sum += g;
          sum_sq += g * g;
        }
        const double mean = sum / trials;
        const double var = std::max(0.0, (sum_sq - trials * mean * mean) / (trials - 1));
        *g_out << nu << "," << mean << "," << std::sqrt(var / trials) << "\n";
      }
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
