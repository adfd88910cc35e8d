#include "charkin/charfn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "charkin/quadrature.hpp"

namespace charkin {

namespace {
constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
    if (std::fabs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}
}  // namespace

void DiscreteMeasure::validate() const {
    if (w.size() != v.size() || w.empty())
        throw std::invalid_argument("DiscreteMeasure: weights/velocities mismatch");
    double total = 0.0;
    for (double wi : w) {
        if (wi < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
        total += wi;
    }
    if (std::fabs(total - 1.0) > 1e-14)
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
}

Vec3 DiscreteMeasure::mean() const {
    Vec3 m{};
    for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * v[j];
    return m;
}

double DiscreteMeasure::energy() const {
    double e = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) e += w[j] * v[j].norm2();
    return e;
}

double DiscreteMeasure::abs_moment(double alpha) const {
    double m = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * std::pow(v[j].norm(), alpha);
    return m;
}

DiscreteMeasure random_discrete_measure(std::mt19937_64& rng, int npoints, double vscale,
                                        bool zero_mean) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.1, 1.0);
    DiscreteMeasure F;
    F.w.resize(npoints);
    F.v.resize(npoints);
    double total = 0.0;
    for (int j = 0; j < npoints; ++j) {
        F.v[j] = vscale * Vec3{uni(rng), uni(rng), uni(rng)};
        F.w[j] = wdist(rng);
        total += F.w[j];
    }
    for (double& wi : F.w) wi /= total;
    // Renormalize once more so the sum is exactly 1 in floating point.
    double check = 0.0;
    for (double wi : F.w) check += wi;
    F.w.back() += 1.0 - check;
    if (zero_mean) {
        const Vec3 m = F.mean();
        for (Vec3& vi : F.v) vi -= m;
    }
    return F;
}

CharEval make_discrete_eval(DiscreteMeasure F) {
    F.validate();
    return [F = std::move(F)](const Vec3& xi) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < F.w.size(); ++j) {
            const double phase = -F.v[j].dot(xi);
            acc += F.w[j] * Complex{std::cos(phase), std::sin(phase)};
        }
        return acc;
    };
}

CharEval make_gaussian_eval(double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian: variance must be > 0");
    return [variance](const Vec3& xi) { return Complex{std::exp(-0.5 * variance * xi.norm2()), 0.0}; };
}

CharEval make_levy_eval(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("levy: alpha out of (0,2]");
    return [alpha](const Vec3& xi) {
        return Complex{std::exp(-std::pow(xi.norm(), alpha)), 0.0};
    };
}

CharGrid::CharGrid(double R, int M) : R_(R), M_(M) {
    if (!(R > 0.0)) throw std::invalid_argument("CharGrid: R must be positive");
    if (M < 3 || M % 2 == 0) throw std::invalid_argument("CharGrid: M must be odd and >= 3");
    h_ = 2.0 * R_ / (M_ - 1);
    data_.assign(std::size_t(M_) * M_ * M_, Complex{0.0, 0.0});
}

Complex CharGrid::interp(const Vec3& xi) const {
    if (!contains(xi)) throw std::out_of_range("CharGrid::interp: point outside grid");
    const double ux = (xi.x + R_) / h_, uy = (xi.y + R_) / h_, uz = (xi.z + R_) / h_;
    int ix = std::min(int(ux), M_ - 2), iy = std::min(int(uy), M_ - 2), iz = std::min(int(uz), M_ - 2);
    const double fx = ux - ix, fy = uy - iy, fz = uz - iz;
    const Complex* d = data_.data();
    const std::size_t i000 = index(ix, iy, iz);
    const std::size_t sx = std::size_t(M_) * M_, sy = M_;
    const Complex c00 = d[i000] * (1.0 - fz) + d[i000 + 1] * fz;
    const Complex c01 = d[i000 + sy] * (1.0 - fz) + d[i000 + sy + 1] * fz;
    const Complex c10 = d[i000 + sx] * (1.0 - fz) + d[i000 + sx + 1] * fz;
    const Complex c11 = d[i000 + sx + sy] * (1.0 - fz) + d[i000 + sx + sy + 1] * fz;
    const Complex c0 = c00 * (1.0 - fy) + c01 * fy;
    const Complex c1 = c10 * (1.0 - fy) + c11 * fy;
    return c0 * (1.0 - fx) + c1 * fx;
}

double CharGrid::max_abs() const {
    double m = 0.0;
    for (const Complex& c : data_) m = std::max(m, std::abs(c));
    return m;
}

double CharGrid::hermitian_defect() const {
    double defect = 0.0;
    for (int ix = 0; ix < M_; ++ix)
        for (int iy = 0; iy < M_; ++iy)
            for (int iz = 0; iz < M_; ++iz) {
                const Complex a = at(ix, iy, iz);
                const Complex b = at(M_ - 1 - ix, M_ - 1 - iy, M_ - 1 - iz);
                defect = std::max(defect, std::abs(a - std::conj(b)));
            }
    return defect;
}

void CharGrid::enforce_hermitian() {
    const int c = center();
    for (int ix = 0; ix < M_; ++ix)
        for (int iy = 0; iy < M_; ++iy)
            for (int iz = 0; iz < M_; ++iz) {
                // Mirror the strict upper half (lexicographic order about the center).
                if (ix < c) continue;
                if (ix == c && iy < c) continue;
                if (ix == c && iy == c && iz < c) continue;
                data_[index(M_ - 1 - ix, M_ - 1 - iy, M_ - 1 - iz)] =
                    std::conj(data_[index(ix, iy, iz)]);
            }
}

CharGrid CharGrid::sample(const CharEval& phi, double R, int M) {
    CharGrid g(R, M);
    const int c = g.center();
    for (int ix = c; ix < M; ++ix)
        for (int iy = 0; iy < M; ++iy)
            for (int iz = 0; iz < M; ++iz) {
                if (ix == c && iy < c) continue;
                if (ix == c && iy == c && iz < c) continue;
                g.set(ix, iy, iz, phi(g.node(ix, iy, iz)));
            }
    g.enforce_hermitian();
    return g;
}

CharGrid from_measure(const DiscreteMeasure& F, double R, int M) {
    return CharGrid::sample(make_discrete_eval(F), R, M);
}

CharGrid gaussian_char(double variance, double R, int M) {
    return CharGrid::sample(make_gaussian_eval(variance), R, M);
}

CharGrid levy_char(double alpha, double R, int M) {
    // alpha = 2 is admitted as the Gaussian boundary case.
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("levy_char: alpha out of (0,2]");
    return CharGrid::sample(make_levy_eval(alpha), R, M);
}

double knorm(const CharGrid& phi, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("knorm: alpha out of (0,2]");
    const int M = phi.M(), c = phi.center();
    double sup = 0.0;
    for (int ix = 0; ix < M; ++ix)
        for (int iy = 0; iy < M; ++iy)
            for (int iz = 0; iz < M; ++iz) {
                if (ix == c && iy == c && iz == c) continue;
                const double xin = phi.node(ix, iy, iz).norm();
                sup = std::max(sup, std::abs(phi.at(ix, iy, iz) - 1.0) / std::pow(xin, alpha));
            }
    return sup;
}

double kdistance(const CharGrid& phi, const CharGrid& psi, double alpha) {
    if (phi.M() != psi.M() || phi.R() != psi.R())
        throw std::invalid_argument("kdistance: grid geometry mismatch");
    const int M = phi.M(), c = phi.center();
    double sup = 0.0;
    for (int ix = 0; ix < M; ++ix)
        for (int iy = 0; iy < M; ++iy)
            for (int iz = 0; iz < M; ++iz) {
                if (ix == c && iy == c && iz == c) continue;
                const double xin = phi.node(ix, iy, iz).norm();
                sup = std::max(sup,
                               std::abs(phi.at(ix, iy, iz) - psi.at(ix, iy, iz)) / std::pow(xin, alpha));
            }
    return sup;
}

PsdVerdict check_positive_definite(const CharEval& phi, int sample_count, std::uint64_t seed,
                                   double sample_radius, double tol_per_point) {
    if (sample_count < 2) throw std::invalid_argument("check_positive_definite: need >= 2 samples");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Vec3> pts;
    pts.reserve(sample_count);
    while (int(pts.size()) < sample_count) {
        const Vec3 p{uni(rng), uni(rng), uni(rng)};
        if (p.norm2() <= 1.0) pts.push_back(sample_radius * p);
    }

    Eigen::MatrixXcd G(sample_count, sample_count);
    for (int j = 0; j < sample_count; ++j)
        for (int l = 0; l < sample_count; ++l) G(j, l) = phi(pts[j] - pts[l]);

    PsdVerdict verdict;
    verdict.hermitian_defect = (G - G.adjoint()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    verdict.min_eigenvalue = es.eigenvalues().minCoeff();
    verdict.psd = verdict.min_eigenvalue >= -tol_per_point * sample_count;
    return verdict;
}

PdResiduals pd_inequality_residuals(const CharEval& phi, const Vec3& xi, const Vec3& eta,
                                    double alpha, double norm_alpha) {
    const Complex pxi = phi(xi), peta = phi(eta);
    const Complex pdiff = phi(xi - eta), psum = phi(xi + eta);
    PdResiduals r;
    r.r1 = 2.0 * (1.0 - pdiff.real()) - std::norm(pxi - peta);
    r.r2 = (1.0 - std::norm(pxi)) * (1.0 - std::norm(peta)) - std::norm(pxi * peta - psum);
    const double a2 = 0.5 * alpha;
    r.r3 = norm_alpha * (4.0 * std::pow(xi.norm(), a2) * std::pow(eta.norm(), a2) +
                         std::pow(eta.norm(), alpha)) -
           std::abs(pxi - psum);
    return r;
}

namespace {

struct AxisSamples {
    Complex plus, minus;
};

AxisSamples axis_at(const CharGrid& phi, int axis, int steps) {
    const int c = phi.center();
    int ix = c, iy = c, iz = c, jx = c, jy = c, jz = c;
    if (axis == 0) { ix += steps; jx -= steps; }
    if (axis == 1) { iy += steps; jy -= steps; }
    if (axis == 2) { iz += steps; jz -= steps; }
    return {phi.at(ix, iy, iz), phi.at(jx, jy, jz)};
}

double energy_estimate(const CharGrid& phi, int steps) {
    const double h = steps * phi.h();
    const Complex p0 = phi.at_origin();
    double e = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        const AxisSamples s = axis_at(phi, axis, steps);
        e -= (s.plus + s.minus - 2.0 * p0).real() / (h * h);
    }
    return e;
}

}  // namespace

Moments moments_from_char(const CharGrid& phi) {
    if ((phi.M() - 1) / 2 < 4)
        throw std::invalid_argument("moments_from_char: grid too coarse for central differences");
    Moments m;
    m.mass = phi.at_origin().real();

    // Momentum: p_j = -Im phi(h e_j)/h + O(h^2); three-level Richardson over
    // (h, 2h, 4h) leaves an O(h^6) residue.
    for (int axis = 0; axis < 3; ++axis) {
        const AxisSamples s1 = axis_at(phi, axis, 1);
        const AxisSamples s2 = axis_at(phi, axis, 2);
        const AxisSamples s4 = axis_at(phi, axis, 4);
        const double h = phi.h();
        const double p1 = -(s1.plus - s1.minus).imag() / (2.0 * h);
        const double p2 = -(s2.plus - s2.minus).imag() / (4.0 * h);
        const double p4 = -(s4.plus - s4.minus).imag() / (8.0 * h);
        const double val = (64.0 * p1 - 20.0 * p2 + p4) / 45.0;
        if (axis == 0) m.momentum.x = val;
        if (axis == 1) m.momentum.y = val;
        if (axis == 2) m.momentum.z = val;
    }

    // Energy: -sum_j d^2 phi(0); divergence under refinement flags infinite energy.
    const double e1 = energy_estimate(phi, 1);
    const double e2 = energy_estimate(phi, 2);
    const double e4 = energy_estimate(phi, 4);
    m.energy = (64.0 * e1 - 20.0 * e2 + e4) / 45.0;
    const double floor = 1e-10;
    if (std::fabs(e1) > floor && std::fabs(e2) > floor && std::fabs(e4) > floor &&
        e1 > 1.15 * e2 && e2 > 1.15 * e4) {
        m.energy_finite = false;
    }
    return m;
}

RadialAverage radial_average(const DiscreteMeasure& F) {
    F.validate();
    double vmax = 0.0;
    for (const Vec3& vj : F.v) vmax = std::max(vmax, vj.norm());
    RadialAverage ra;
    ra.osc_scale = vmax;
    ra.avg = [F](double rho) {
        double s = 0.0;
        for (std::size_t j = 0; j < F.w.size(); ++j) s += F.w[j] * sinc(rho * F.v[j].norm());
        return 1.0 - s;
    };
    return ra;
}

RadialAverage radial_average_gaussian(double variance) {
    RadialAverage ra;
    ra.avg = [variance](double rho) { return 1.0 - std::exp(-0.5 * variance * rho * rho); };
    return ra;
}

RadialAverage radial_average_levy(double alpha) {
    RadialAverage ra;
    ra.avg = [alpha](double rho) { return 1.0 - std::exp(-std::pow(rho, alpha)); };
    return ra;
}

RadialAverage radial_average_grid(const CharGrid& phi, int sphere_order) {
    const GaussRule polar = gauss_legendre(sphere_order, -1.0, 1.0);
    const int n_az = 2 * sphere_order;
    RadialAverage ra;
    ra.rho_cap = phi.R();  // stay within the inscribed ball of the cube
    ra.osc_scale = 0.0;
    ra.avg = [phi, polar, n_az](double rho) {
        double acc = 0.0, wsum = 0.0;
        for (std::size_t i = 0; i < polar.x.size(); ++i) {
            const double ct = polar.x[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int k = 0; k < n_az; ++k) {
                const double psi = 2.0 * kPi * k / n_az;
                const Vec3 dir{st * std::cos(psi), st * std::sin(psi), ct};
                acc += polar.w[i] * (1.0 - phi.interp(rho * dir).real());
                wsum += polar.w[i];
            }
        }
        return acc / wsum;
    };
    return ra;
}

double fractional_moment_integral(const RadialAverage& f, double alpha, double delta) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("fractional_moment: alpha out of (0,2)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("fractional_moment: delta out of (0,1)");
    double hi = 1.0 / delta;
    if (f.rho_cap > 0.0) hi = std::min(hi, f.rho_cap);
    const double lo = delta;
    if (!(hi > lo)) throw std::invalid_argument("fractional_moment: empty radial range");

    const auto integrand = [&](double rho) { return std::pow(rho, -1.0 - alpha) * f.avg(rho); };

    // Log-spaced panels, refined so oscillatory profiles stay resolved.
    double total = 0.0;
    double a = lo;
    const double grow = 1.25;
    while (a < hi) {
        double b = std::min(hi, a * grow);
        if (f.osc_scale > 0.0) b = std::min(b, a + kPi / f.osc_scale);
        if (b - a < 1e-14 * a) b = std::min(hi, a + 1e-14 * a);
        total += gl_integrate(integrand, a, b, 12);
        a = b;
    }
    return 4.0 * kPi * total;
}

double fractional_moment(const RadialAverage& f, double alpha, double delta) {
    // Calibration measure: a point mass at |v| = 2.
    DiscreteMeasure ref;
    ref.w = {1.0};
    ref.v = {Vec3{2.0, 0.0, 0.0}};
    const double c_alpha =
        fractional_moment_integral(radial_average(ref), alpha, delta) / std::pow(2.0, alpha);
    return fractional_moment_integral(f, alpha, delta) / c_alpha;
}

}  // namespace charkin
