#pragma once

#include <vector>

#include "charkin/solver.hpp"
#include "charkin/vec3.hpp"

namespace charkin {

/// Moment-order threshold above which infinite-energy initial data still
/// produce solutions, as a function of the kernel exponents:
///   s <  1/2:                 max{gamma/(2s) + 1, 0}
///   s >= 1/2, gamma + 2s < 1: max{gamma + 2s, 0}
///   gamma + 2s >= 1:          gamma/(2s - 1) + 2
/// Conditions are evaluated with >= at the case boundaries.
double c_gamma_s(double gamma, double s);

/// W_delta(v) = <v>^{alpha0} <delta v>^{-alpha0}; bounded by delta^{-alpha0}
/// for delta <= 1 and subadditive along inelastic collisions for alpha0 <= 2.
double weight_W_delta(const Vec3& v, double delta, double alpha0);

/// W_{delta,kappa,n}(x) = (1+x)^{1 + n kappa/2} / (1 + delta (1+x)^{kappa/2}).
double weight_W_kappa(double x, double delta, double kappa, int n);

/// Central second difference of W_{delta,kappa,n} with a relative step sized
/// against rounding noise; convex with an (1+x)^{n kappa/2 - 1} envelope.
double weight_W_kappa_second_difference(double x, double delta, double kappa, int n);

/// Flattened per-time moment data of a run with drift/monotonicity verdicts.
struct MomentTrace {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<Vec3> momentum;
    std::vector<double> energy;
    std::vector<bool> energy_finite;
    std::vector<double> fractional_orders;
    std::vector<double> fractional_times;                // interval end times
    std::vector<std::vector<double>> fractional_values;  // [order][time]

    double max_mass_defect = 0.0;
    double max_momentum_drift = 0.0;     // max_t |p(t) - p(0)| (sup norm)
    double max_energy_increase = 0.0;    // max over steps of E_{k+1} - E_k
    double total_energy_drop = 0.0;      // E(0) - E(T)
    bool any_energy_nonfinite = false;
};

MomentTrace trace_moments(const RunResult& run);

}  // namespace charkin
