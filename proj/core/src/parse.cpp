#include "kdist/parse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace kdist {
namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// split a comma-separated argument list at the top nesting level
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

struct Call {
  std::string name;
  std::vector<std::string> pos;                 // positional arguments
  std::map<std::string, std::string> kw;        // key=value arguments
};

Call parse_call(const std::string& text) {
  const std::string s = trim(text);
  Call c;
  const size_t open = s.find_first_of("([");
  if (open == std::string::npos) {
    c.name = s;
    return c;
  }
  c.name = trim(s.substr(0, open));
  const char close = s[open] == '(' ? ')' : ']';
  if (s.back() != close)
    throw validation_error("parse: unbalanced brackets in '" + text + "'");
  const std::string inner = s.substr(open + 1, s.size() - open - 2);
  for (const std::string& arg : split_args(inner)) {
    // key=value only when the '=' is outside any nested call
    const size_t eq = arg.find('=');
    const size_t nest = arg.find_first_of("([");
    if (eq != std::string::npos && (nest == std::string::npos || eq < nest)) {
      c.kw[trim(arg.substr(0, eq))] = trim(arg.substr(eq + 1));
    } else {
      c.pos.push_back(arg);
    }
  }
  return c;
}

double to_double(const std::string& s) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw validation_error("parse: '" + s + "' is not a number");
  }
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-12) throw validation_error("parse: '" + s + "' is not an integer");
  return i;
}

// fetch argument `key` (or positional index i); sentinel default means required
const std::string REQUIRED = "\x01required";
std::string arg_of(const Call& c, const std::string& key, size_t i,
                   const std::string& def = REQUIRED) {
  auto it = c.kw.find(key);
  if (it != c.kw.end()) return it->second;
  if (i < c.pos.size()) return c.pos[i];
  if (def != REQUIRED) return def;
  throw validation_error("parse: " + c.name + " needs argument '" + key + "'");
}

int dim_of(const Call& c, size_t i) { return to_int(arg_of(c, "d", i, "1")); }

TorusKernelSpec torus_inner_spec(const std::string& text) {
  const Call c = parse_call(text);
  TorusKernelSpec spec;
  if (c.name == "poisson") {
    spec.family = TorusKernelSpec::Family::Poisson;
    spec.sigma = to_double(arg_of(c, "sigma", 0));
  } else if (c.name == "dirichlet") {
    spec.family = TorusKernelSpec::Family::Dirichlet;
    spec.n = to_int(arg_of(c, "n", 0));
  } else if (c.name == "fejer") {
    spec.family = TorusKernelSpec::Family::Fejer;
    spec.n = to_int(arg_of(c, "n", 0));
  } else if (c.name == "cosine") {
    spec.family = TorusKernelSpec::Family::Cosine;
    spec.sigma = to_double(arg_of(c, "m", 0));
  } else {
    throw validation_error("parse: unknown torus kernel family '" + c.name + "'");
  }
  return spec;
}

}  // namespace

KernelPtr parse_kernel(const std::string& text) {
  const Call c = parse_call(text);
  const std::string& n = c.name;
  if (n == "gaussian") return make_gaussian(to_double(arg_of(c, "sigma", 0)), dim_of(c, 1));
  if (n == "laplacian") return make_laplacian(to_double(arg_of(c, "sigma", 0)), dim_of(c, 1));
  if (n == "matern")
    return make_matern(to_double(arg_of(c, "nu", 0)), to_double(arg_of(c, "sigma", 1, "1")),
                       dim_of(c, 2));
  if (n == "bspline") return make_bspline(to_int(arg_of(c, "order", 0)), dim_of(c, 1));
  if (n == "sinc") return make_sinc(to_double(arg_of(c, "sigma", 0)), dim_of(c, 1));
  if (n == "imq")
    return make_inverse_multiquadric(to_double(arg_of(c, "sigma", 0, "1")),
                                     to_double(arg_of(c, "c", 1, "1")), dim_of(c, 2));
  if (n == "expdot")
    return make_exp_dot(to_double(arg_of(c, "sigma", 0, "1")), dim_of(c, 1),
                        arg_of(c, "compact", 9, "false") == "true");
  if (n == "trivial") return make_trivial(to_double(arg_of(c, "c", 0, "1")), dim_of(c, 1));
  if (n == "dotproduct") return make_dot_product(dim_of(c, 0));
  if (n == "poly2") return make_poly2(dim_of(c, 0));
  if (n == "cosine") return make_cosine(to_double(arg_of(c, "sigma", 0)), dim_of(c, 1));
  if (n == "poisson") return make_poisson_r(to_double(arg_of(c, "sigma", 0)), dim_of(c, 1));
  if (n == "dirichlet")
    return make_dirichlet_r(to_int(arg_of(c, "l", 0)),
                            to_double(arg_of(c, "tau", 1, std::to_string(TWO_PI))),
                            dim_of(c, 2));
  if (n == "fejer") return make_fejer_r(to_int(arg_of(c, "l", 0)), dim_of(c, 1));
  if (n == "sum") {
    if (c.pos.size() != 2) throw validation_error("parse: sum(k1,k2)");
    return make_sum(parse_kernel(c.pos[0]), parse_kernel(c.pos[1]));
  }
  if (n == "product") {
    if (c.pos.size() != 2) throw validation_error("parse: product(k1,k2)");
    return make_product(parse_kernel(c.pos[0]), parse_kernel(c.pos[1]));
  }
  if (n == "scale") {
    if (c.pos.size() != 2) throw validation_error("parse: scale(c,k)");
    return make_scaled(to_double(c.pos[0]), parse_kernel(c.pos[1]));
  }
  if (n == "torus") {
    if (c.pos.empty()) throw validation_error("parse: torus(family(...)[,d=..])");
    return make_torus(torus_inner_spec(c.pos[0]), to_int(arg_of(c, "d", 1, "1")));
  }
  throw validation_error("parse: unknown kernel '" + n + "'");
}

Measure parse_measure(const std::string& text) {
  const Call c = parse_call(text);
  const std::string& n = c.name;
  if (n == "gaussian")
    return Measure::gaussian(to_double(arg_of(c, "mu", 0, "0")),
                             to_double(arg_of(c, "sigma", 1, "1")));
  if (n == "uniform")
    return Measure::uniform(to_double(arg_of(c, "a", 0)), to_double(arg_of(c, "b", 1)));
  if (n == "cauchy")
    return Measure::cauchy(to_double(arg_of(c, "x0", 0, "0")),
                           to_double(arg_of(c, "gamma", 1, "1")));
  if (n == "cauchypow") return Measure::cauchy_power(to_int(arg_of(c, "l", 0)));
  if (n == "dirac") return Measure::dirac(to_double(arg_of(c, "x", 0)));
  if (n == "perturbed") {
    if (c.pos.empty()) throw validation_error("parse: perturbed(base,alpha=..,nu=..)");
    return Measure::perturbed(parse_measure(c.pos[0]),
                              to_double(arg_of(c, "alpha", 1)),
                              to_double(arg_of(c, "nu", 2)));
  }
  if (n == "discrete") {
    std::vector<std::pair<double, double>> atoms;
    for (const std::string& a : c.pos) {
      const Call pt = parse_call(a);
      if (pt.pos.size() != 2)
        throw validation_error("parse: discrete atoms are (x,weight) pairs");
      atoms.emplace_back(to_double(pt.pos[0]), to_double(pt.pos[1]));
    }
    if (atoms.empty()) throw validation_error("parse: discrete measure needs atoms");
    return Measure::discrete1(atoms);
  }
  if (n == "torusuniform") return Measure::torus_uniform(to_int(arg_of(c, "d", 0, "1")));
  throw validation_error("parse: unknown measure '" + n + "'");
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("config: cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config: line " + std::to_string(lineno) +
                             " is not key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace kdist
