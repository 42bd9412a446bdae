#pragma once

#include <map>
#include <string>

#include "kdist/kernel.hpp"
#include "kdist/measure.hpp"

namespace kdist {

// Kernel text forms: gaussian(1), gaussian(sigma=1.0,d=1), laplacian(1),
// matern(nu=0.5,sigma=1), bspline(1), sinc(6.2832), imq(sigma=1,c=1),
// expdot(1), trivial(2), dotproduct, poly2, cosine(2), poisson(0.5),
// dirichlet(2), dirichlet(l=2,tau=2), fejer(3), sum(a,b), product(a,b),
// scale(2,k), torus(poisson(0.5)), torus(dirichlet(2),d=2).
KernelPtr parse_kernel(const std::string& text);

// Measure text forms: gaussian(0,1), uniform(-1,1), cauchy(0,1),
// cauchypow(2), perturbed(uniform(-1,1),alpha=0.5,nu=2),
// discrete[(0,0.5),(2,0.5)], dirac(0).
Measure parse_measure(const std::string& text);

// Flat key=value config files (one pair per line, '#' comments).
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace kdist
