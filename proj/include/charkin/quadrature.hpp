#pragma once

#include <functional>
#include <vector>

namespace charkin {

/// Gauss-Legendre nodes and weights on [a, b].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

GaussRule gauss_legendre(int order, double a, double b);

/// Fixed-order Gauss-Legendre integral of f over [a, b].
double gl_integrate(const std::function<double(double)>& f, double a, double b, int order);

/// Composite Gauss-Legendre over uniform panels.
double gl_composite(const std::function<double(double)>& f, double a, double b, int panels,
                    int order);

/// Adaptive quadrature (GSL QAG, 61-point rule) with absolute/relative targets.
/// Returns the integral estimate; abserr_out (optional) receives the error bound.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double epsabs = 1e-12, double epsrel = 1e-10,
                          double* abserr_out = nullptr);

/// Integral over [a, b] with geometrically graded panels accumulating toward a
/// (for integrands singular or steep at the left endpoint).  Panel k spans
/// [a + (b-a) q^{k+1}, a + (b-a) q^k]; stops once a panel contributes less than
/// tol * |total| or after max_panels.
double graded_integrate_left(const std::function<double(double)>& f, double a, double b,
                             double q, int order, double tol, int max_panels,
                             bool* converged = nullptr);

}  // namespace charkin
