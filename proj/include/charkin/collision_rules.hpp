#pragma once

#include <vector>

#include "charkin/charfn.hpp"
#include "charkin/kernels.hpp"
#include "charkin/kinematics.hpp"
#include "charkin/vec3.hpp"

namespace charkin {

/// Quadrature of int_{|zeta| <= Z} hat(Phi_c)(zeta) F(zeta) dzeta as
/// sum_k w[k] F(node[k]).  Radial Gauss-Legendre on [0, Z], Gauss-Legendre in
/// the polar cosine, uniform azimuth with an even node count so the rule is
/// antipodally symmetric (w includes rho^2 hat(rho) and all measures).
struct ZetaRule {
    std::vector<Vec3> node;
    std::vector<double> norm;  // |node|, cached for radial lookups
    std::vector<double> w;
    double Z = 0.0;
    double ball_integral = 0.0;  // sum of w = quadrature of int_ball hat dzeta
};

ZetaRule make_zeta_rule(const KineticCutoff& kc, double Z, int n_radial, int n_polar,
                        int n_azimuth);

/// Far-field closure for a discrete initial datum: the zeta integrals beyond
/// the ball reduce against plane waves to
///   tail_jk = Phi_c(|v_j - v_k|) - ball_transform(|v_j - v_k|, Z),
/// applied with the frozen far-field state phi_0.
struct ClosurePair {
    Vec3 vj, vk;
    double wjk = 0.0;
    double tail = 0.0;
};

std::vector<ClosurePair> make_closure(const DiscreteMeasure& F, const KineticCutoff& kc,
                                      double Z);

/// Exact-background terms for discrete data: against plane waves the full
/// zeta integral of the phi0 (x) phi0 block collapses to Phi_c values,
///   int hat(zeta) phi0(A - zeta) phi0(B + zeta) dzeta
///     = sum_jk w_j w_k Phi_c(|v_j - v_k|) e^{-i(v_j.A + v_k.B)},
/// leaving only the deviation psi = phi - phi0 (compactly supported in the
/// evolved ball) under the quadrature.
struct PlaneWaveTerm {
    Vec3 vj, vk;
    double wjk = 0.0;
    double phic = 0.0;  // Phi_c(|vj - vk|)
};

std::vector<PlaneWaveTerm> make_plane_wave_terms(const DiscreteMeasure& F,
                                                 const KineticCutoff& kc);

/// Azimuth node table (cos/sin of 2 pi k / n).
struct AzimuthTable {
    std::vector<double> c, s;
    explicit AzimuthTable(int n);
    int size() const { return int(c.size()); }
};

}  // namespace charkin
