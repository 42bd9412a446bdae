#pragma once

#include <functional>
#include <vector>

namespace kdist {

struct QuadResult {
  double value = 0.0;
  double err = 0.0;  // estimated absolute error
};

// Adaptive Gauss-Legendre quadrature: 15-point panels, error estimated from
// the embedded 7-point rule, bisection until the per-panel tolerance is met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-9, int max_depth = 48);

// Fixed composite rule: `panels` panels of 16-point Gauss-Legendre on [a,b].
// Returns nodes and weights; exact mass sum(w) = b-a up to rounding.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};
Rule composite_gl(double a, double b, int panels);

}  // namespace kdist
