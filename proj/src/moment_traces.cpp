#include "charkin/moment_traces.hpp"

#include <cmath>
#include <stdexcept>

namespace charkin {

double c_gamma_s(double gamma, double s) {
    if (!(gamma >= -2.0 && gamma < 0.0)) throw std::invalid_argument("c_gamma_s: gamma out of [-2,0)");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("c_gamma_s: s out of (0,1)");
    if (s < 0.5) return std::max(gamma / (2.0 * s) + 1.0, 0.0);
    if (gamma + 2.0 * s < 1.0) return std::max(gamma + 2.0 * s, 0.0);
    return gamma / (2.0 * s - 1.0) + 2.0;
}

double weight_W_delta(const Vec3& v, double delta, double alpha0) {
    if (!(delta > 0.0)) throw std::invalid_argument("weight_W_delta: delta must be > 0");
    if (!(alpha0 > 0.0 && alpha0 <= 2.0))
        throw std::invalid_argument("weight_W_delta: alpha0 out of (0,2]");
    const double v2 = v.norm2();
    return std::pow((1.0 + v2) / (1.0 + delta * delta * v2), 0.5 * alpha0);
}

double weight_W_kappa(double x, double delta, double kappa, int n) {
    if (!(x >= 0.0)) throw std::invalid_argument("weight_W_kappa: x must be >= 0");
    if (!(delta > 0.0) || !(kappa > 0.0) || n < 1)
        throw std::invalid_argument("weight_W_kappa: bad parameters");
    const double base = 1.0 + x;
    return std::pow(base, 1.0 + 0.5 * n * kappa) / (1.0 + delta * std::pow(base, 0.5 * kappa));
}

double weight_W_kappa_second_difference(double x, double delta, double kappa, int n) {
    // Relative step balances truncation against cancellation in doubles.
    const double h = 5e-4 * (1.0 + x);
    const double xm = std::max(0.0, x - h);
    const double f0 = weight_W_kappa(xm, delta, kappa, n);
    const double f1 = weight_W_kappa(x, delta, kappa, n);
    const double f2 = weight_W_kappa(x + h, delta, kappa, n);
    // Allow for the clamped left node near x = 0.
    const double hl = x - xm, hr = h;
    if (hl == 0.0) return 2.0 * (f2 - f1) / (hr * hr);  // one-sided at the origin
    return (hr * f0 - (hl + hr) * f1 + hl * f2) * 2.0 / (hl * hr * (hl + hr));
}

MomentTrace trace_moments(const RunResult& run) {
    MomentTrace tr;
    const auto flat = run.trace();
    if (flat.empty()) return tr;

    for (const auto& [t, m] : flat) {
        tr.times.push_back(t);
        tr.mass.push_back(m.mass);
        tr.momentum.push_back(m.momentum);
        tr.energy.push_back(m.energy);
        tr.energy_finite.push_back(m.energy_finite);
        if (!m.energy_finite) tr.any_energy_nonfinite = true;
        tr.max_mass_defect = std::max(tr.max_mass_defect, std::fabs(m.mass - 1.0));
    }

    const Vec3 p0 = tr.momentum.front();
    for (const Vec3& p : tr.momentum) {
        const Vec3 d = p - p0;
        tr.max_momentum_drift = std::max(
            tr.max_momentum_drift,
            std::max(std::fabs(d.x), std::max(std::fabs(d.y), std::fabs(d.z))));
    }
    for (std::size_t k = 0; k + 1 < tr.energy.size(); ++k)
        if (tr.energy_finite[k] && tr.energy_finite[k + 1])
            tr.max_energy_increase =
                std::max(tr.max_energy_increase, tr.energy[k + 1] - tr.energy[k]);
    if (tr.energy_finite.front() && tr.energy_finite.back())
        tr.total_energy_drop = tr.energy.front() - tr.energy.back();

    if (!run.intervals.empty() && !run.intervals.front().fractional_t1.empty()) {
        tr.fractional_orders = run.intervals.front().fractional_orders;
        tr.fractional_values.assign(tr.fractional_orders.size(), {});
        for (const IntervalResult& iv : run.intervals) {
            tr.fractional_times.push_back(iv.t1);
            for (std::size_t q = 0; q < tr.fractional_orders.size(); ++q)
                tr.fractional_values[q].push_back(iv.fractional_t1[q]);
        }
    }
    return tr;
}

}  // namespace charkin
