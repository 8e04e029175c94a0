#ifndef SSCL_QUADRATURE_HPP
#define SSCL_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace sscl {

// 16-point Gauss-Legendre on [a,b]; exact for polynomials up to degree 31.
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

// Composite rule: integrates over [a,b] split at the interior breakpoints,
// one Gauss panel per smooth piece. Breakpoints outside (a,b) are ignored.
double piecewise_gauss(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breakpoints);

// Adaptive Simpson to an absolute tolerance; used by test oracles.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 30);

}  // namespace sscl

#endif
