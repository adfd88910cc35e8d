#include "charkin/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <stdexcept>

namespace charkin {

namespace {

struct GslEnvInit {
    GslEnvInit() { gsl_set_error_handler_off(); }
};
const GslEnvInit gsl_env_init;

double call_std_function(double x, void* params) {
    auto* f = static_cast<const std::function<double(double)>*>(params);
    return (*f)(x);
}

}  // namespace

GaussRule gauss_legendre(int order, double a, double b) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(order);
    if (!t) throw std::runtime_error("gauss_legendre: table allocation failed");
    GaussRule rule;
    rule.x.resize(order);
    rule.w.resize(order);
    for (int i = 0; i < order; ++i)
        gsl_integration_glfixed_point(a, b, i, &rule.x[i], &rule.w[i], t);
    gsl_integration_glfixed_table_free(t);
    return rule;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule rule = gauss_legendre(order, a, b);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += rule.w[i] * f(rule.x[i]);
    return s;
}

double gl_composite(const std::function<double(double)>& f, double a, double b, int panels,
                    int order) {
    if (panels < 1) throw std::invalid_argument("gl_composite: panels must be >= 1");
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += gl_integrate(f, a + p * h, a + (p + 1) * h, order);
    return s;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double epsabs, double epsrel, double* abserr_out) {
    constexpr size_t kLimit = 2000;
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(kLimit), gsl_integration_workspace_free);
    if (!ws) throw std::runtime_error("adaptive_integrate: workspace allocation failed");

    gsl_function gf;
    gf.function = &call_std_function;
    gf.params = const_cast<std::function<double(double)>*>(&f);

    double result = 0.0, abserr = 0.0;
    const int status = gsl_integration_qag(&gf, a, b, epsabs, epsrel, kLimit,
                                           GSL_INTEG_GAUSS61, ws.get(), &result, &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER)
        throw std::runtime_error("adaptive_integrate: GSL QAG failed");
    if (abserr_out) *abserr_out = abserr;
    return result;
}

double graded_integrate_left(const std::function<double(double)>& f, double a, double b,
                             double q, int order, double tol, int max_panels, bool* converged) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("graded_integrate_left: q in (0,1)");
    const double span = b - a;
    double total = 0.0;
    double hi = b;
    bool done = false;
    for (int k = 1; k <= max_panels; ++k) {
        const double lo = a + span * std::pow(q, k);
        const double piece = gl_integrate(f, lo, hi, order);
        total += piece;
        hi = lo;
        if (k > 3 && std::fabs(piece) <= tol * std::max(std::fabs(total), 1e-300)) {
            done = true;
            break;
        }
    }
    if (converged) *converged = done;
    return total;
}

}  // namespace charkin
