#include "kdist/quadrature.hpp"

#include <cmath>

#include "kdist/common.hpp"

namespace kdist {
namespace {

// Gauss-Legendre nodes/weights on [-1,1].
constexpr double GL7_X[4] = {0.0, 0.4058451513773972, 0.7415311855993945,
                             0.9491079123427585};
constexpr double GL7_W[4] = {0.4179591836734694, 0.3818300505051189,
                             0.2797053914892766, 0.1294849661688697};

constexpr double GL15_X[8] = {0.0,
                              0.2011940939974345,
                              0.3941513470775634,
                              0.5709721726085388,
                              0.7244177313601700,
                              0.8482065834104272,
                              0.9372733924007060,
                              0.9879925180204854};
constexpr double GL15_W[8] = {0.2025782419255613, 0.1984314853271116,
                              0.1861610000155622, 0.1662692058169939,
                              0.1395706779261543, 0.1071592204671719,
                              0.0703660474881081, 0.0307532419961173};

constexpr double GL16_X[8] = {0.0950125098376374, 0.2816035507792589,
                              0.4580167776572274, 0.6178762444026438,
                              0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double GL16_W[8] = {0.1894506104550685, 0.1826034150449236,
                              0.1691565193950025, 0.1495959888165767,
                              0.1246289712555339, 0.0951585116824928,
                              0.0622535239386479, 0.0271524594117541};

struct PanelEval {
  double g7, g15;
};

PanelEval eval_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double g7 = GL7_W[0] * f(c);
  for (int i = 1; i < 4; ++i)
    g7 += GL7_W[i] * (f(c - h * GL7_X[i]) + f(c + h * GL7_X[i]));
  double g15 = GL15_W[0] * f(c);
  for (int i = 1; i < 8; ++i)
    g15 += GL15_W[i] * (f(c - h * GL15_X[i]) + f(c + h * GL15_X[i]));
  return {g7 * h, g15 * h};
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol, int depth, QuadResult& out) {
  const PanelEval pe = eval_panel(f, a, b);
  const double err = std::abs(pe.g15 - pe.g7);
  if (err <= tol || depth <= 0) {
    out.value += pe.g15;
    out.err += err;
    return;
  }
  const double c = 0.5 * (a + b);
  adapt(f, a, c, 0.5 * tol, depth - 1, out);
  adapt(f, c, b, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
  QuadResult out;
  if (!(a < b)) {
    if (a == b) return out;
    QuadResult r = integrate(f, b, a, abs_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  // Seed with a few panels so narrow features away from the midpoint are not
  // missed by the first error estimate.
  const int seed_panels = 8;
  const double h = (b - a) / seed_panels;
  for (int i = 0; i < seed_panels; ++i)
    adapt(f, a + i * h, a + (i + 1) * h, abs_tol / seed_panels, max_depth, out);
  return out;
}

Rule composite_gl(double a, double b, int panels) {
  if (panels < 1) panels = 1;
  Rule r;
  r.x.reserve(16 * panels);
  r.w.reserve(16 * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    const double s = 0.5 * h;
    for (int i = 7; i >= 0; --i) {
      r.x.push_back(c - s * GL16_X[i]);
      r.w.push_back(s * GL16_W[i]);
    }
    for (int i = 0; i < 8; ++i) {
      r.x.push_back(c + s * GL16_X[i]);
      r.w.push_back(s * GL16_W[i]);
    }
  }
  return r;
}

}  // namespace kdist
