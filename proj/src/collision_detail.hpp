// Internal engine machinery shared by the serial and OpenMP sweep kernels.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "charkin/charfn.hpp"
#include "charkin/collision_rules.hpp"
#include "charkin/kernels.hpp"
#include "charkin/kinematics.hpp"
#include "charkin/solver.hpp"

namespace charkin::detail {

/// Raw-pointer trilinear view of a materialized CharGrid.
struct GridView {
    const Complex* d = nullptr;
    int M = 0;
    double R = 0.0;
    double inv_h = 0.0;

    explicit GridView(const CharGrid& g)
        : d(g.data().data()), M(g.M()), R(g.R()), inv_h(1.0 / g.h()) {}

    Complex interp(double x, double y, double z) const {
        const double ux = (x + R) * inv_h, uy = (y + R) * inv_h, uz = (z + R) * inv_h;
        if (!(ux >= 0.0 && uy >= 0.0 && uz >= 0.0 && ux <= M - 1 && uy <= M - 1 && uz <= M - 1))
            throw std::out_of_range("collision sweep: lookup outside the grid");
        int ix = int(ux), iy = int(uy), iz = int(uz);
        if (ix > M - 2) ix = M - 2;
        if (iy > M - 2) iy = M - 2;
        if (iz > M - 2) iz = M - 2;
        const double fx = ux - ix, fy = uy - iy, fz = uz - iz;
        const std::size_t sx = std::size_t(M) * M, sy = M;
        const Complex* p = d + (std::size_t(ix) * M + iy) * M + iz;
        const Complex c00 = p[0] + fz * (p[1] - p[0]);
        const Complex c01 = p[sy] + fz * (p[sy + 1] - p[sy]);
        const Complex c10 = p[sx] + fz * (p[sx + 1] - p[sx]);
        const Complex c11 = p[sx + sy] + fz * (p[sx + sy + 1] - p[sx + sy]);
        const Complex c0 = c00 + fy * (c01 - c00);
        const Complex c1 = c10 + fy * (c11 - c10);
        return c0 + fx * (c1 - c0);
    }
};

/// Six-point Lagrange view of a radial profile sampled at i*h (O(h^6));
/// the profile is even, so the stencil mirrors across the origin.
struct RadialView {
    const double* d = nullptr;
    int n = 0;
    double inv_h = 0.0;

    RadialView(const double* data, int count, double h) : d(data), n(count), inv_h(1.0 / h) {}

    double node(int i) const {
        if (i < 0) i = -i;  // even mirror
        if (i > n - 1) i = n - 1;
        return d[i];
    }

    double interp(double r) const {
        const double u = r * inv_h;
        if (!(u >= 0.0 && u <= n - 1)) throw std::out_of_range("radial sweep: lookup outside profile");
        const int i = std::min(int(u), n - 2);
        const double t = u - i;
        // Lagrange stencil at offsets -2..3 around the cell [i, i+1].
        const double t0 = t + 2.0, t1 = t + 1.0, t2 = t, t3 = t - 1.0, t4 = t - 2.0,
                     t5 = t - 3.0;
        const double c0 = t1 * t2 * t3 * t4 * t5 * (-1.0 / 120.0);
        const double c1 = t0 * t2 * t3 * t4 * t5 * (1.0 / 24.0);
        const double c2 = t0 * t1 * t3 * t4 * t5 * (-1.0 / 12.0);
        const double c3 = t0 * t1 * t2 * t4 * t5 * (1.0 / 12.0);
        const double c4 = t0 * t1 * t2 * t3 * t5 * (-1.0 / 24.0);
        const double c5 = t0 * t1 * t2 * t3 * t4 * (1.0 / 120.0);
        return c0 * node(i - 2) + c1 * node(i - 1) + c2 * node(i) + c3 * node(i + 1) +
               c4 * node(i + 2) + c5 * node(i + 3);
    }
};

/// Shared collision-rule context.
struct RuleContext {
    AngularRule ang;
    AzimuthTable az{2};
    ZetaRule zeta;
    std::vector<ClosurePair> closure;
    RestitutionParams rp{1.0};
    double A = 0.0;       // sup |Phi_c|
    double mass_b = 0.0;  // sphere quadrature of the angular kernel
    double A_eff = 0.0;   // mass_b * A

    // Exact-background mode (discrete data): the grid stores the deviation
    // psi = phi - phi0; the phi0 (x) phi0 block bypasses the zeta quadrature.
    bool exact_bg = false;
    std::vector<PlaneWaveTerm> exact_pairs;
    std::vector<Vec3> bg_v;        // measure points of phi0
    std::vector<double> bg_w;      // their weights
    std::vector<Complex> bg_D;     // D[j*nzeta + k] = e^{-i v_j . zeta_k}
    std::vector<Complex> phi0_zeta;  // phi0(zeta_k)

    void build_background_tables() {
        const std::size_t np = bg_v.size(), nz = zeta.node.size();
        bg_D.assign(np * nz, Complex{0.0, 0.0});
        phi0_zeta.assign(nz, Complex{0.0, 0.0});
        for (std::size_t j = 0; j < np; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                const double ph = bg_v[j].dot(zeta.node[k]);
                bg_D[j * nz + k] = Complex{std::cos(ph), -std::sin(ph)};
                phi0_zeta[k] += bg_w[j] * bg_D[j * nz + k];
            }
    }
};

inline Complex unit_phase(double phase) {  // exp(-i*phase)
    return Complex{std::cos(phase), -std::sin(phase)};
}

/// G1 + G2 at one node in exact-background mode: `psi` holds the deviation
/// phi - phi0 (zero outside the evolved ball), `psi_zeta` its cached values
/// at the zeta nodes.
inline Complex grid_rhs_node_bg(const RuleContext& rc, const GridView& psi, const Vec3& xi,
                                const Complex* psi_zeta) {
    const double xin = xi.norm();
    const std::size_t nz = rc.zeta.node.size();
    const std::size_t np = rc.bg_v.size();

    // W_j = w_j e^{-i v_j . xi}; phi0(xi - zeta_k) = sum_j W_j conj(D_jk).
    Complex Wj[8];
    for (std::size_t j = 0; j < np; ++j) Wj[j] = rc.bg_w[j] * unit_phase(rc.bg_v[j].dot(xi));

    Complex loss{0.0, 0.0};
    for (const PlaneWaveTerm& t : rc.exact_pairs)
        loss += t.wjk * t.phic * unit_phase(t.vk.dot(xi));
    for (std::size_t k = 0; k < nz; ++k) {
        const Vec3& z = rc.zeta.node[k];
        const Complex psib = psi.interp(xi.x - z.x, xi.y - z.y, xi.z - z.z);
        Complex phi0b{0.0, 0.0};
        for (std::size_t j = 0; j < np; ++j) phi0b += Wj[j] * std::conj(rc.bg_D[j * nz + k]);
        loss += rc.zeta.w[k] * (rc.phi0_zeta[k] * psib + psi_zeta[k] * (phi0b + psib));
    }

    Complex gain{0.0, 0.0};
    if (xin < 1e-14) {
        Complex s{0.0, 0.0};
        for (const PlaneWaveTerm& t : rc.exact_pairs) s += t.wjk * t.phic;
        for (std::size_t k = 0; k < nz; ++k) {
            const Vec3& z = rc.zeta.node[k];
            const Complex psia = psi.interp(-z.x, -z.y, -z.z);
            const Complex phi0a = std::conj(rc.phi0_zeta[k]);
            s += rc.zeta.w[k] * (phi0a * psi_zeta[k] + psia * (rc.phi0_zeta[k] + psi_zeta[k]));
        }
        gain = rc.mass_b * s;
    } else {
        const Vec3 axis = xi / xin;
        const Vec3 e1 = any_orthogonal(axis);
        const Vec3 e2 = axis.cross(e1);
        const double cplus = 0.5 + 0.5 * rc.rp.a_minus;
        const double cminus = 0.5 - 0.5 * rc.rp.a_minus;
        const double shalf = 0.5 * rc.rp.a_plus;
        const int naz = rc.az.size();
        Complex Pj[8], Rj[8];
        for (std::size_t i = 0; i < rc.ang.t.size(); ++i) {
            const double ct = rc.ang.t[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double wi = rc.ang.wb[i] / naz;
            for (int a = 0; a < naz; ++a) {
                const Vec3 sigma = ct * axis + st * (rc.az.c[a] * e1 + rc.az.s[a] * e2);
                const Vec3 xp = cplus * xi + (shalf * xin) * sigma;
                const Vec3 xm = cminus * xi - (shalf * xin) * sigma;

                Complex inner{0.0, 0.0};
                for (const PlaneWaveTerm& t : rc.exact_pairs)
                    inner += t.wjk * t.phic * unit_phase(t.vj.dot(xp) + t.vk.dot(xm));
                // phi0(xp - zeta) = sum_j P_j conj(D_jk), phi0(xm + zeta) = sum_j R_j D_jk.
                for (std::size_t j = 0; j < np; ++j) {
                    Pj[j] = rc.bg_w[j] * unit_phase(rc.bg_v[j].dot(xp));
                    Rj[j] = rc.bg_w[j] * unit_phase(rc.bg_v[j].dot(xm));
                }
                for (std::size_t k = 0; k < nz; ++k) {
                    const Vec3& z = rc.zeta.node[k];
                    const Complex psia = psi.interp(xp.x - z.x, xp.y - z.y, xp.z - z.z);
                    const Complex psib = psi.interp(xm.x + z.x, xm.y + z.y, xm.z + z.z);
                    Complex phi0a{0.0, 0.0}, phi0b{0.0, 0.0};
                    for (std::size_t j = 0; j < np; ++j) {
                        phi0a += Pj[j] * std::conj(rc.bg_D[j * nz + k]);
                        phi0b += Rj[j] * rc.bg_D[j * nz + k];
                    }
                    inner += rc.zeta.w[k] * (phi0a * psib + psia * (phi0b + psib));
                }
                gain += wi * inner;
            }
        }
    }

    // phi(xi) = phi0(xi) + psi(xi).
    Complex phi0xi{0.0, 0.0};
    for (std::size_t j = 0; j < np; ++j) phi0xi += Wj[j];
    const Complex phixi = phi0xi + psi.interp(xi.x, xi.y, xi.z);
    return gain + rc.A_eff * phixi - rc.mass_b * loss;
}

/// G1 + G2 at one Fourier node of a 3D grid state.
inline Complex grid_rhs_node(const RuleContext& rc, const GridView& phi, const Vec3& xi) {
    const double xin = xi.norm();

    // Loss-side zeta sum (sigma independent): sum w phi(zeta) phi(xi - zeta).
    Complex loss{0.0, 0.0};
    const std::size_t nz = rc.zeta.node.size();
    for (std::size_t k = 0; k < nz; ++k) {
        const Vec3& z = rc.zeta.node[k];
        loss += rc.zeta.w[k] * phi.interp(z.x, z.y, z.z) *
                phi.interp(xi.x - z.x, xi.y - z.y, xi.z - z.z);
    }
    for (const ClosurePair& p : rc.closure)
        loss += p.wjk * p.tail * unit_phase(p.vk.dot(xi));

    Complex gain{0.0, 0.0};
    if (xin < 1e-14) {
        Complex s{0.0, 0.0};
        for (std::size_t k = 0; k < nz; ++k) {
            const Vec3& z = rc.zeta.node[k];
            s += rc.zeta.w[k] * phi.interp(z.x, z.y, z.z) *
                 phi.interp(-z.x, -z.y, -z.z);
        }
        for (const ClosurePair& p : rc.closure) s += p.wjk * p.tail;
        gain = rc.mass_b * s;
    } else {
        const Vec3 axis = xi / xin;
        const Vec3 e1 = any_orthogonal(axis);
        const Vec3 e2 = axis.cross(e1);
        const double cplus = 0.5 + 0.5 * rc.rp.a_minus;
        const double cminus = 0.5 - 0.5 * rc.rp.a_minus;
        const double shalf = 0.5 * rc.rp.a_plus;
        const int naz = rc.az.size();
        for (std::size_t i = 0; i < rc.ang.t.size(); ++i) {
            const double ct = rc.ang.t[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double wi = rc.ang.wb[i] / naz;
            for (int a = 0; a < naz; ++a) {
                const Vec3 sigma = ct * axis + st * (rc.az.c[a] * e1 + rc.az.s[a] * e2);
                const Vec3 xp = cplus * xi + (shalf * xin) * sigma;
                const Vec3 xm = cminus * xi - (shalf * xin) * sigma;
                Complex inner{0.0, 0.0};
                for (std::size_t k = 0; k < nz; ++k) {
                    const Vec3& z = rc.zeta.node[k];
                    inner += rc.zeta.w[k] *
                             phi.interp(xp.x - z.x, xp.y - z.y, xp.z - z.z) *
                             phi.interp(xm.x + z.x, xm.y + z.y, xm.z + z.z);
                }
                for (const ClosurePair& p : rc.closure)
                    inner += p.wjk * p.tail * unit_phase(p.vj.dot(xp) + p.vk.dot(xm));
                gain += wi * inner;
            }
        }
    }

    const Complex phixi = phi.interp(xi.x, xi.y, xi.z);
    return gain + rc.A_eff * phixi - rc.mass_b * loss;
}

/// G1 + G2 at |xi| = q for an isotropic (radial) state.  The sigma azimuth
/// collapses by isotropy; the zeta rule stays three-dimensional.
inline double radial_rhs_node(const RuleContext& rc, const RadialView& phi, double q) {
    const std::size_t nz = rc.zeta.node.size();

    double loss = 0.0;
    for (std::size_t k = 0; k < nz; ++k) {
        const Vec3& z = rc.zeta.node[k];
        const double dx = z.x, dy = z.y, dz = q - z.z;  // xi = q * zhat
        loss += rc.zeta.w[k] * phi.interp(rc.zeta.norm[k]) *
                phi.interp(std::sqrt(dx * dx + dy * dy + dz * dz));
    }

    double gain = 0.0;
    if (q < 1e-14) {
        double s = 0.0;
        for (std::size_t k = 0; k < nz; ++k) {
            const double zn = rc.zeta.norm[k];
            const double v = phi.interp(zn);
            s += rc.zeta.w[k] * v * v;
        }
        gain = rc.mass_b * s;
    } else {
        const double cplus = 0.5 + 0.5 * rc.rp.a_minus;
        const double cminus = 0.5 - 0.5 * rc.rp.a_minus;
        const double shalf = 0.5 * rc.rp.a_plus;
        for (std::size_t i = 0; i < rc.ang.t.size(); ++i) {
            const double ct = rc.ang.t[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            // sigma = (st, 0, ct) in the frame with xi along z.
            const double xp_x = shalf * q * st, xp_z = cplus * q + shalf * q * ct;
            const double xm_x = -xp_x, xm_z = cminus * q - shalf * q * ct;
            double inner = 0.0;
            for (std::size_t k = 0; k < nz; ++k) {
                const Vec3& z = rc.zeta.node[k];
                const double ax = xp_x - z.x, ay = -z.y, azv = xp_z - z.z;
                const double bx = xm_x + z.x, by = z.y, bz = xm_z + z.z;
                inner += rc.zeta.w[k] * phi.interp(std::sqrt(ax * ax + ay * ay + azv * azv)) *
                         phi.interp(std::sqrt(bx * bx + by * by + bz * bz));
            }
            gain += rc.ang.wb[i] * inner;
        }
    }

    return gain + rc.A_eff * phi.interp(q) - rc.mass_b * loss;
}

struct GridNodeRef {
    std::size_t flat = 0;
    std::size_t mirror = 0;
    Vec3 xi{};
};

/// Sweep entry points; implemented twice (serial reference and OpenMP).
/// psi_zeta is the per-sweep cache of the deviation at the zeta nodes
/// (exact-background mode only; nullptr otherwise).
void sweep_grid_serial(const RuleContext& rc, const GridView& phi,
                       const std::vector<GridNodeRef>& nodes, const Complex* psi_zeta,
                       Complex* out);
void sweep_grid_omp(const RuleContext& rc, const GridView& phi,
                    const std::vector<GridNodeRef>& nodes, const Complex* psi_zeta,
                    Complex* out);
void sweep_radial_serial(const RuleContext& rc, const RadialView& phi,
                         const std::vector<double>& radii, double* out);
void sweep_radial_omp(const RuleContext& rc, const RadialView& phi,
                      const std::vector<double>& radii, double* out);

}  // namespace charkin::detail
