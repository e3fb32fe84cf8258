#pragma once

#include <cmath>
#include <functional>

namespace nlevy {

/// Adaptive Simpson on [a,b]. Plain recursion with absolute tolerance; the
/// integrands here are smooth between the breakpoints callers choose.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

/// 32-point Gauss-Legendre on [a,b].
double gauss_legendre_32(const std::function<double(double)>& f, double a, double b);

}  // namespace nlevy
