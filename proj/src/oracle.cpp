#include "charkin/oracle.hpp"

#include <cmath>

#include "charkin/quadrature.hpp"

namespace charkin {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 0.5 * kPi;

Complex unit_phase(double phase) { return Complex{std::cos(phase), -std::sin(phase)}; }
}  // namespace

TestFunction tf_constant() {
    TestFunction tf;
    tf.tag = TestFunction::Tag::Constant;
    tf.name = "1";
    tf.psi = [](const Vec3&) { return 1.0; };
    tf.grad = [](const Vec3&) { return Vec3{}; };
    return tf;
}

TestFunction tf_coordinate(int j) {
    if (j < 0 || j > 2) throw std::invalid_argument("tf_coordinate: j in {0,1,2}");
    TestFunction tf;
    tf.tag = TestFunction::Tag::Coordinate;
    tf.coordinate = j;
    tf.name = "v_" + std::to_string(j);
    tf.psi = [j](const Vec3& v) { return v[j]; };
    tf.grad = [j](const Vec3&) {
        Vec3 g{};
        if (j == 0) g.x = 1.0;
        if (j == 1) g.y = 1.0;
        if (j == 2) g.z = 1.0;
        return g;
    };
    return tf;
}

TestFunction tf_energy() {
    TestFunction tf;
    tf.tag = TestFunction::Tag::Energy;
    tf.name = "|v|^2";
    tf.psi = [](const Vec3& v) { return v.norm2(); };
    tf.grad = [](const Vec3& v) { return 2.0 * v; };
    return tf;
}

TestFunction tf_weighted(double l) {
    TestFunction tf;
    tf.tag = TestFunction::Tag::Weighted;
    tf.name = "<v>^" + std::to_string(l);
    tf.psi = [l](const Vec3& v) { return std::pow(1.0 + v.norm2(), 0.5 * l); };
    tf.grad = [l](const Vec3& v) {
        return l * std::pow(1.0 + v.norm2(), 0.5 * l - 1.0) * v;
    };
    return tf;
}

TestFunction tf_custom(std::string name, std::function<double(const Vec3&)> psi,
                       std::function<Vec3(const Vec3&)> grad) {
    TestFunction tf;
    tf.tag = TestFunction::Tag::Custom;
    tf.name = std::move(name);
    tf.psi = std::move(psi);
    tf.grad = std::move(grad);
    return tf;
}

double tf_gradient_defect(const TestFunction& tf, const Vec3& v, double h) {
    const Vec3 g = tf.grad(v);
    double defect = 0.0;
    for (int j = 0; j < 3; ++j) {
        Vec3 dp = v, dm = v;
        if (j == 0) { dp.x += h; dm.x -= h; }
        if (j == 1) { dp.y += h; dm.y -= h; }
        if (j == 2) { dp.z += h; dm.z -= h; }
        const double fd = (tf.psi(dp) - tf.psi(dm)) / (2.0 * h);
        defect = std::max(defect, std::fabs(fd - g[j]) / std::max(1.0, std::fabs(g[j])));
    }
    return defect;
}

KineticFn kinetic_power(double gamma) {
    return [gamma](double u) {
        if (!(u > 0.0)) throw std::invalid_argument("kinetic |u|^gamma singular at u = 0");
        return std::pow(u, gamma);
    };
}

KineticFn kinetic_from_cutoff(const KineticCutoff& kc) {
    return [&kc](double u) { return kc.eval(u); };
}

double L_e_B(const TestFunction& tf, const Vec3& v, const Vec3& v_star, const AngularRule& rule,
             int n_azimuth, const KineticFn& kinetic, const RestitutionParams& rp) {
    const Vec3 u = v - v_star;
    const double un = u.norm();
    const double phi_factor = kinetic(un);  // raw kernels throw at u = 0
    if (phi_factor == 0.0) return 0.0;

    const SphereBasis frame = sphere_basis({v, v_star});
    const AzimuthTable az(n_azimuth);
    const double psi_v = tf.psi(v), psi_vs = tf.psi(v_star);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.t.size(); ++i) {
        const double ct = rule.t[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double az_sum = 0.0;
        for (int a = 0; a < n_azimuth; ++a) {
            const Vec3 sigma =
                ct * frame.q_hat + st * (az.c[a] * frame.h_hat + az.s[a] * frame.j_hat);
            const VelocityPair post =
                post_collision({v, v_star}, SphereDirection::unchecked(sigma), rp);
            az_sum += tf.psi(post.v) + tf.psi(post.v_star) - psi_v - psi_vs;
        }
        acc += rule.wb[i] * az_sum / n_azimuth;
    }
    return phi_factor * acc;
}

double compensated_L(const TestFunction& tf, const Vec3& v, const Vec3& v_star,
                     const AngularKernel& b, const KineticFn& kinetic,
                     const RestitutionParams& rp, int n_azimuth, double tol, int max_panels,
                     bool* converged) {
    const Vec3 u = v - v_star;
    const double un = u.norm();
    const double phi_factor = kinetic(un);
    if (phi_factor == 0.0) {
        if (converged) *converged = true;
        return 0.0;
    }

    const SphereBasis frame = sphere_basis({v, v_star});
    const AzimuthTable az(n_azimuth);
    const Vec3 grad_diff = tf.grad(v) - tf.grad(v_star);
    const double comp_scale = rp.a_plus * 0.5 * un;
    const double psi_v = tf.psi(v), psi_vs = tf.psi(v_star);

    // theta integrand with the O(theta) part subtracted pointwise; the
    // subtraction sums to zero over the symmetric azimuth nodes.
    auto theta_integrand = [&](double theta) {
        const double ct = std::cos(theta), st = std::sin(theta);
        double az_sum = 0.0;
        for (int a = 0; a < n_azimuth; ++a) {
            const Vec3 sigma =
                ct * frame.q_hat + st * (az.c[a] * frame.h_hat + az.s[a] * frame.j_hat);
            const VelocityPair post =
                post_collision({v, v_star}, SphereDirection::unchecked(sigma), rp);
            const double delta = tf.psi(post.v) + tf.psi(post.v_star) - psi_v - psi_vs;
            const Vec3 comp_dir = sigma.dot(frame.q_hat) * frame.q_hat - sigma;
            az_sum += delta + comp_scale * grad_diff.dot(comp_dir);
        }
        return 2.0 * kPi / n_azimuth * az_sum * b.eval_theta(theta) * st;
    };

    // Geometrically graded panels toward theta = 0, split at the cutoff kink
    // so each panel sees a smooth kernel.  The absolute floor stops the
    // subdivision once panels are pure rounding noise (the singular kernel
    // amplifies it as theta -> 0).
    const double kink = b.is_cutoff() && b.kink_cos() < 1.0 - 1e-12 && b.kink_cos() > 1e-12
                            ? std::acos(b.kink_cos())
                            : -1.0;
    auto panel = [&](double lo, double hi) {
        if (kink > lo && kink < hi)
            return gl_integrate(theta_integrand, lo, kink, 10) +
                   gl_integrate(theta_integrand, kink, hi, 10);
        return gl_integrate(theta_integrand, lo, hi, 10);
    };
    double acc = 0.0;
    double hi = kHalfPi;
    bool done = false;
    for (int k = 1; k <= max_panels; ++k) {
        const double lo = kHalfPi * std::pow(0.5, k);
        const double piece = panel(lo, hi);
        acc += piece;
        hi = lo;
        if (k > 4 && std::fabs(piece) <= std::max(tol * std::fabs(acc), 1e-13)) {
            done = true;
            break;
        }
    }
    if (converged) *converged = done;
    return phi_factor * acc;
}

double weak_rhs(const DiscreteMeasure& F, const TestFunction& tf, const AngularRule& rule,
                int n_azimuth, const KineticFn& kinetic, const RestitutionParams& rp) {
    F.validate();
    double acc = 0.0;
    for (std::size_t i = 0; i < F.w.size(); ++i)
        for (std::size_t j = 0; j < F.w.size(); ++j) {
            if (i == j) continue;  // Phi_c(0) = 0: coincident pairs do not collide
            acc += F.w[i] * F.w[j] * L_e_B(tf, F.v[i], F.v[j], rule, n_azimuth, kinetic, rp);
        }
    return 0.5 * acc;
}

namespace {

Complex gain_velocity_side(const DiscreteMeasure& F, const Vec3& xi, const AngularRule& rule,
                           const AzimuthTable& az, const KineticCutoff& kc,
                           const RestitutionParams& rp) {
    Complex lhs{0.0, 0.0};
    const int n_azimuth = az.size();
    for (std::size_t i = 0; i < F.w.size(); ++i)
        for (std::size_t j = 0; j < F.w.size(); ++j) {
            if (i == j) continue;
            const Vec3 v = F.v[i], vs = F.v[j];
            const double phic = kc.eval((v - vs).norm());
            if (phic == 0.0) continue;
            const SphereBasis frame = sphere_basis({v, vs});
            Complex pair_sum{0.0, 0.0};
            for (std::size_t p = 0; p < rule.t.size(); ++p) {
                const double ct = rule.t[p];
                const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                Complex az_sum{0.0, 0.0};
                for (int a = 0; a < n_azimuth; ++a) {
                    const Vec3 sigma =
                        ct * frame.q_hat + st * (az.c[a] * frame.h_hat + az.s[a] * frame.j_hat);
                    const VelocityPair post =
                        post_collision({v, vs}, SphereDirection::unchecked(sigma), rp);
                    az_sum += unit_phase(post.v.dot(xi));
                }
                pair_sum += rule.wb[p] * az_sum / double(n_azimuth);
            }
            lhs += F.w[i] * F.w[j] * phic * pair_sum;
        }
    return lhs;
}

GainCheckResult finish_gain_check(Complex lhs, Complex rhs) {
    GainCheckResult out;
    out.lhs = lhs;
    out.rhs = rhs;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    out.rel_gap = scale > 1e-12 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    return out;
}

}  // namespace

GainCheckResult gain_term_fourier_check(const DiscreteMeasure& F, const Vec3& xi,
                                        const AngularRule& rule, int n_azimuth,
                                        const KineticCutoff& kc, double Z,
                                        const RestitutionParams& rp) {
    F.validate();
    const AzimuthTable az(n_azimuth);
    const Complex lhs = gain_velocity_side(F, xi, rule, az, kc, rp);

    // Fourier side: zeta integral reduced per pair over the ball |zeta| <= Z,
    //   int_ball hat(zeta) e^{i zeta.(vj - vk)} dzeta = W(|vj - vk|; Z),
    // then the sigma quadrature of the pair phases e^{-i(vj.xi+ + vk.xi-)}.
    const std::size_t n = F.w.size();
    std::vector<double> W(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            W[j * n + k] = kc.ball_transform((F.v[j] - F.v[k]).norm(), Z);

    Complex rhs{0.0, 0.0};
    const double xin = xi.norm();
    if (xin < 1e-14) {
        Complex s{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) s += F.w[j] * F.w[k] * W[j * n + k];
        double mass = 0.0;
        for (double w : rule.wb) mass += w;
        rhs = mass * s;
    } else {
        const Vec3 axis = xi / xin;
        const Vec3 e1 = any_orthogonal(axis);
        const Vec3 e2 = axis.cross(e1);
        for (std::size_t p = 0; p < rule.t.size(); ++p) {
            const double ct = rule.t[p];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            Complex az_sum{0.0, 0.0};
            for (int a = 0; a < n_azimuth; ++a) {
                const Vec3 sigma = ct * axis + st * (az.c[a] * e1 + az.s[a] * e2);
                const auto [xp, xm] = xi_split(xi, sigma, rp);
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t k = 0; k < n; ++k)
                        az_sum += F.w[j] * F.w[k] * W[j * n + k] *
                                  unit_phase(F.v[j].dot(xp) + F.v[k].dot(xm));
            }
            rhs += rule.wb[p] * az_sum / double(n_azimuth);
        }
    }
    return finish_gain_check(lhs, rhs);
}

GainCheckResult gain_term_fourier_check_ball3d(const DiscreteMeasure& F, const Vec3& xi,
                                               const AngularRule& rule, int n_azimuth,
                                               const KineticCutoff& kc, const ZetaRule& zeta,
                                               const RestitutionParams& rp) {
    F.validate();
    const AzimuthTable az(n_azimuth);
    const Complex lhs = gain_velocity_side(F, xi, rule, az, kc, rp);

    const CharEval phiF = make_discrete_eval(F);
    Complex rhs{0.0, 0.0};
    const double xin = xi.norm();
    if (xin < 1e-14) {
        Complex s{0.0, 0.0};
        for (std::size_t k = 0; k < zeta.node.size(); ++k)
            s += zeta.w[k] * phiF(-zeta.node[k]) * phiF(zeta.node[k]);
        double mass = 0.0;
        for (double w : rule.wb) mass += w;
        rhs = mass * s;
    } else {
        const Vec3 axis = xi / xin;
        const Vec3 e1 = any_orthogonal(axis);
        const Vec3 e2 = axis.cross(e1);
        for (std::size_t p = 0; p < rule.t.size(); ++p) {
            const double ct = rule.t[p];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            Complex az_sum{0.0, 0.0};
            for (int a = 0; a < n_azimuth; ++a) {
                const Vec3 sigma = ct * axis + st * (az.c[a] * e1 + az.s[a] * e2);
                const auto [xp, xm] = xi_split(xi, sigma, rp);
                Complex inner{0.0, 0.0};
                for (std::size_t k = 0; k < zeta.node.size(); ++k)
                    inner += zeta.w[k] * phiF(xp - zeta.node[k]) * phiF(xm + zeta.node[k]);
                az_sum += inner;
            }
            rhs += rule.wb[p] * az_sum / double(n_azimuth);
        }
    }
    return finish_gain_check(lhs, rhs);
}

namespace {

double moment_of(const Moments& m, const TestFunction& tf) {
    switch (tf.tag) {
        case TestFunction::Tag::Constant: return m.mass;
        case TestFunction::Tag::Coordinate: return m.momentum[tf.coordinate];
        case TestFunction::Tag::Energy: return m.energy;
        default:
            throw std::invalid_argument(
                "crosscheck_time_derivative: psi must be constant, coordinate or energy");
    }
}

double solver_slope(const DiscreteMeasure& F0, const TestFunction& tf,
                    const RestitutionParams& rp, const KernelConfig& kernel,
                    const SolverConfig& cfg, double dt) {
    SolverConfig run_cfg = cfg;
    run_cfg.T_final = dt;
    const RunResult run = run_solver(Datum::discrete(F0), rp, kernel, run_cfg);
    if (!run.completed) throw std::runtime_error("crosscheck: solver run did not converge");
    const auto trace = run.trace();
    const double m0 = moment_of(trace.front().second, tf);
    const double m1 = moment_of(trace.back().second, tf);
    return (m1 - m0) / dt;
}

}  // namespace

TimeDerivativeCheck crosscheck_time_derivative(const DiscreteMeasure& F0,
                                               const TestFunction& tf,
                                               const RestitutionParams& rp,
                                               const KernelConfig& kernel, SolverConfig cfg,
                                               double dt) {
    const AngularKernel bn = cutoff_angular(make_angular(kernel), kernel.n);
    const AngularRule rule = make_angular_rule(bn, cfg.sphere_polar, cfg.normalize_angular);
    const KineticCutoff kc(kernel.gamma, kernel.r, 40.0, 0.05);

    TimeDerivativeCheck out;
    out.weak_value = weak_rhs(F0, tf, rule, cfg.sphere_azimuth, kinetic_from_cutoff(kc), rp);

    // Richardson in dt removes the O(dt) term of the forward difference.
    const double d1 = solver_slope(F0, tf, rp, kernel, cfg, dt);
    const double d2 = solver_slope(F0, tf, rp, kernel, cfg, 0.5 * dt);
    out.solver_slope = 2.0 * d2 - d1;

    out.abs_gap = std::fabs(out.solver_slope - out.weak_value);
    out.rel_gap = out.abs_gap / std::max(std::fabs(out.weak_value), 1e-12);
    return out;
}

}  // namespace charkin
