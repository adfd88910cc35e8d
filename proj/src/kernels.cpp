#include "charkin/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "charkin/quadrature.hpp"

namespace charkin {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kHalfPi = 0.5 * kPi;

/// C^inf transition exp(-1/x) for x > 0, 0 otherwise.
double cinf_ramp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// Smooth step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = cinf_ramp(x);
    const double b = cinf_ramp(1.0 - x);
    return a / (a + b);
}

}  // namespace

AngularKernel::AngularKernel(double K, double s, double level) : K_(K), s_(s), level_(level) {
    if (!(K > 0.0) || !(s > 0.0 && s < 1.0))
        throw std::invalid_argument("AngularKernel: require K > 0 and s in (0,1)");
    if (std::isfinite(level_)) {
        if (!(level_ > 0.0)) throw std::invalid_argument("AngularKernel: cutoff level must be > 0");
        const double b_max_angle = K_ * std::pow(kHalfPi, -1.0 - 2.0 * s_);
        if (b_max_angle >= level_) {
            // Capped on the whole domain.
            kink_theta_ = kHalfPi;
            kink_cos_ = 0.0;
        } else {
            // b is strictly decreasing in theta; bisect b(theta) = level.
            double lo = 1e-14, hi = kHalfPi;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (K_ * std::pow(mid, -1.0 - 2.0 * s_) / std::sin(mid) > level_)
                    lo = mid;
                else
                    hi = mid;
            }
            kink_theta_ = 0.5 * (lo + hi);
            kink_cos_ = std::cos(kink_theta_);
        }
    }
}

double AngularKernel::eval_theta(double theta) const {
    if (!(theta > 0.0)) return is_cutoff() ? level_ : std::numeric_limits<double>::infinity();
    const double raw = K_ * std::pow(theta, -1.0 - 2.0 * s_) / std::sin(theta);
    return is_cutoff() ? std::min(raw, level_) : raw;
}

double AngularKernel::eval_cos(double t) const {
    const double tc = std::clamp(t, 0.0, 1.0);
    return eval_theta(std::acos(tc));
}

double AngularKernel::sphere_mass_exact() const {
    if (!is_cutoff()) return std::numeric_limits<double>::infinity();
    // On the capped region the integrand is level*sin(theta); outside it is
    // exactly K theta^(-1-2s).
    const double capped = level_ * (1.0 - std::cos(kink_theta_));
    const double tail = kink_theta_ < kHalfPi
                            ? K_ / (2.0 * s_) *
                                  (std::pow(kink_theta_, -2.0 * s_) - std::pow(kHalfPi, -2.0 * s_))
                            : 0.0;
    return kTwoPi * (capped + tail);
}

AngularKernel make_angular(const KernelConfig& cfg) {
    cfg.validate();
    return AngularKernel(cfg.K, cfg.s, AngularKernel::kUncut);
}

AngularKernel cutoff_angular(const AngularKernel& b, double n) {
    if (!(n >= 2.0)) throw std::invalid_argument("cutoff_angular: n must be >= 2");
    const double level = b.is_cutoff() ? std::min(b.level(), n) : n;
    return AngularKernel(b.K(), b.s(), level);
}

AngularRule make_angular_rule(const AngularKernel& b, int polar_order, bool normalize) {
    if (polar_order < 2) throw std::invalid_argument("make_angular_rule: order must be >= 2");
    if (!b.is_cutoff())
        throw std::invalid_argument("make_angular_rule: fixed rules need a cutoff kernel");

    AngularRule rule;
    const double tk = b.kink_cos();
    std::vector<std::pair<double, double>> panels;
    if (tk > 1e-12 && tk < 1.0 - 1e-12) {
        panels = {{0.0, tk}, {tk, 1.0}};
    } else {
        panels = {{0.0, 1.0}};
    }
    const int per_panel = std::max(4, (polar_order + int(panels.size()) - 1) / int(panels.size()));
    for (const auto& [a, c] : panels) {
        const GaussRule gl = gauss_legendre(per_panel, a, c);
        for (int i = 0; i < per_panel; ++i) {
            rule.t.push_back(gl.x[i]);
            rule.wb.push_back(gl.w[i] * kTwoPi * b.eval_cos(gl.x[i]));
        }
    }
    rule.mass = 0.0;
    for (double w : rule.wb) rule.mass += w;
    if (normalize) return normalize_angular(rule);
    return rule;
}

AngularRule normalize_angular(const AngularRule& rule) {
    if (!(rule.mass > 0.0))
        throw std::invalid_argument("normalize_angular: kernel has zero sphere integral");
    AngularRule out = rule;
    for (double& w : out.wb) w /= rule.mass;
    out.normalized = true;
    return out;
}

KineticCutoff::KineticCutoff(double gamma, double r, double table_zmax, double table_dz)
    : gamma_(gamma), r_(r), zmax_(table_zmax), dz_(table_dz) {
    if (!(gamma >= -2.0 && gamma < 0.0))
        throw std::invalid_argument("KineticCutoff: gamma out of [-2,0)");
    if (!(r > 1.0)) throw std::invalid_argument("KineticCutoff: r must be > 1");
    if (!(zmax_ > 0.0) || !(dz_ > 0.0)) throw std::invalid_argument("KineticCutoff: bad table spec");
    compute_sup();
    build_table();
}

double KineticCutoff::bump(double rho) const {
    const double lo = support_lo(), hi = support_hi();
    if (rho <= lo || rho >= hi) return 0.0;
    const double ramp_in_end = 1.0 / r_;
    if (rho < ramp_in_end) return smooth_step((rho - lo) / (ramp_in_end - lo));
    if (rho <= r_) return 1.0;
    return smooth_step((hi - rho) / (hi - r_));
}

double KineticCutoff::eval(double rho) const {
    const double b = bump(rho);
    return b == 0.0 ? 0.0 : std::pow(rho, gamma_) * b;
}

void KineticCutoff::compute_sup() {
    const double lo = support_lo(), hi = support_hi();
    const int scan = 8192;
    double best = 0.0, best_rho = lo;
    for (int i = 0; i <= scan; ++i) {
        const double rho = lo + (hi - lo) * i / scan;
        const double v = std::fabs(eval(rho));
        if (v > best) {
            best = v;
            best_rho = rho;
        }
    }
    // Local golden-section refinement around the scan winner.
    double a = std::max(lo, best_rho - (hi - lo) / scan);
    double c = std::min(hi, best_rho + (hi - lo) / scan);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    while (c - a > 1e-12) {
        const double x1 = c - phi * (c - a);
        const double x2 = a + phi * (c - a);
        if (std::fabs(eval(x1)) < std::fabs(eval(x2)))
            a = x1;
        else
            c = x2;
    }
    A_ = std::max(best, std::fabs(eval(0.5 * (a + c))));
}

double KineticCutoff::hat_direct(double z) const {
    const double lo = support_lo(), hi = support_hi();
    constexpr double inv_two_pi2 = 1.0 / (2.0 * kPi * kPi);
    if (z < 1e-6) {
        const double i2 = adaptive_integrate([&](double rho) { return rho * rho * eval(rho); }, lo, hi);
        const double i4 = adaptive_integrate(
            [&](double rho) { return rho * rho * rho * rho * eval(rho); }, lo, hi);
        return inv_two_pi2 * (i2 - z * z / 6.0 * i4);
    }
    const int panels = std::max(4, int(std::ceil((hi - lo) * z / kPi)) + 2);
    const double integral = gl_composite(
        [&](double rho) { return rho * eval(rho) * std::sin(z * rho); }, lo, hi, panels, 12);
    return inv_two_pi2 * integral / z;
}

double KineticCutoff::ball_transform(double u, double Z) const {
    if (!(Z > 0.0)) return 0.0;
    auto integrand = [&](double rho) {
        const double x = rho * u;
        const double s = std::fabs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        return rho * rho * hat_direct(rho) * s;
    };
    // Resolve both the sinc oscillation (frequency u) and the intrinsic
    // oscillation of hat (frequencies up to the support edge 2r).
    const double freq = std::max(u, 2.0 * r_);
    const int panels = std::max(8, int(std::ceil(Z * freq / kPi)) + 2);
    return 4.0 * kPi * gl_composite(integrand, 0.0, Z, panels, 12);
}

void KineticCutoff::build_table() {
    const int count = int(std::floor(zmax_ / dz_)) + 1;
    zmax_ = (count - 1) * dz_;
    hat_.resize(count);
    for (int k = 0; k < count; ++k) hat_[k] = hat_direct(k * dz_);

    // Fritsch-Carlson slopes (monotone cubic on uniform spacing).
    slope_.assign(count, 0.0);
    std::vector<double> d(count - 1);
    for (int k = 0; k + 1 < count; ++k) d[k] = (hat_[k + 1] - hat_[k]) / dz_;
    slope_[0] = 0.0;  // hat is even in zeta
    slope_[count - 1] = d[count - 2];
    for (int k = 1; k + 1 < count; ++k) {
        if (d[k - 1] * d[k] <= 0.0)
            slope_[k] = 0.0;
        else
            slope_[k] = 2.0 * d[k - 1] * d[k] / (d[k - 1] + d[k]);
    }

    // Cumulative rho^2 |hat| from the right (trapezoid on the sample grid).
    tailcum_.assign(count, 0.0);
    for (int k = count - 2; k >= 0; --k) {
        const double zl = k * dz_, zr = (k + 1) * dz_;
        const double fl = zl * zl * std::fabs(hat_[k]);
        const double fr = zr * zr * std::fabs(hat_[k + 1]);
        tailcum_[k] = tailcum_[k + 1] + 0.5 * (fl + fr) * dz_;
    }
}

double KineticCutoff::hat(double z) const {
    if (!(z >= 0.0)) throw std::invalid_argument("hat: zeta_norm must be >= 0");
    if (z >= zmax_) return 0.0;
    const int k = std::min(int(z / dz_), int(hat_.size()) - 2);
    const double u = (z - k * dz_) / dz_;
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * hat_[k] + h10 * dz_ * slope_[k] + h01 * hat_[k + 1] + h11 * dz_ * slope_[k + 1];
}

double KineticCutoff::tail_mass(double Z) const {
    if (Z <= 0.0) return 1.0;
    if (Z >= zmax_) return 0.0;
    const int k = std::min(int(Z / dz_), int(tailcum_.size()) - 2);
    const double u = (Z - k * dz_) / dz_;
    const double tail = tailcum_[k] * (1.0 - u) + tailcum_[k + 1] * u;
    return tail / tailcum_[0];
}

KineticCutoff make_kinetic_cutoff(const KernelConfig& cfg, double table_zmax, double table_dz) {
    cfg.validate();
    const double zmax = table_zmax > 0.0 ? table_zmax : 80.0;
    return KineticCutoff(cfg.gamma, cfg.r, zmax, table_dz);
}

}  // namespace charkin
