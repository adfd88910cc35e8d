#include "charkin/collision_rules.hpp"

#include <cmath>
#include <stdexcept>

#include "charkin/quadrature.hpp"

namespace charkin {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ZetaRule make_zeta_rule(const KineticCutoff& kc, double Z, int n_radial, int n_polar,
                        int n_azimuth) {
    if (!(Z > 0.0)) throw std::invalid_argument("make_zeta_rule: Z must be positive");
    if (n_radial < 4 || n_polar < 2 || n_azimuth < 2)
        throw std::invalid_argument("make_zeta_rule: node counts too small");
    if (n_azimuth % 2 != 0)
        throw std::invalid_argument("make_zeta_rule: azimuth count must be even");

    const GaussRule rad = gauss_legendre(n_radial, 0.0, Z);
    const GaussRule pol = gauss_legendre(n_polar, -1.0, 1.0);
    const double waz = 2.0 * kPi / n_azimuth;

    ZetaRule rule;
    rule.Z = Z;
    rule.node.reserve(std::size_t(n_radial) * n_polar * n_azimuth);
    for (int ir = 0; ir < n_radial; ++ir) {
        const double rho = rad.x[ir];
        // Weights use the direct transform: the interpolation error of the
        // tabulated hat would otherwise enter the dynamics.
        const double radw = rad.w[ir] * rho * rho * kc.hat_direct(rho);
        for (int ip = 0; ip < n_polar; ++ip) {
            const double ct = pol.x[ip];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int ia = 0; ia < n_azimuth; ++ia) {
                const double psi = 2.0 * kPi * ia / n_azimuth;
                rule.node.push_back(Vec3{rho * st * std::cos(psi), rho * st * std::sin(psi),
                                         rho * ct});
                rule.norm.push_back(rho);
                rule.w.push_back(radw * pol.w[ip] * waz);
            }
        }
    }
    for (double w : rule.w) rule.ball_integral += w;
    return rule;
}

std::vector<ClosurePair> make_closure(const DiscreteMeasure& F, const KineticCutoff& kc,
                                      double Z) {
    F.validate();
    std::vector<ClosurePair> pairs;
    const std::size_t n = F.w.size();
    pairs.reserve(n * n);
    // Cache ball transforms per distinct pair distance.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            ClosurePair p;
            p.vj = F.v[j];
            p.vk = F.v[k];
            p.wjk = F.w[j] * F.w[k];
            p.tail = kc.tail_transform((F.v[j] - F.v[k]).norm(), Z);
            pairs.push_back(p);
        }
    return pairs;
}

std::vector<PlaneWaveTerm> make_plane_wave_terms(const DiscreteMeasure& F,
                                                 const KineticCutoff& kc) {
    F.validate();
    std::vector<PlaneWaveTerm> terms;
    const std::size_t n = F.w.size();
    terms.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            PlaneWaveTerm t;
            t.vj = F.v[j];
            t.vk = F.v[k];
            t.wjk = F.w[j] * F.w[k];
            t.phic = kc.eval((F.v[j] - F.v[k]).norm());
            terms.push_back(t);
        }
    return terms;
}

AzimuthTable::AzimuthTable(int n) {
    if (n < 1) throw std::invalid_argument("AzimuthTable: n must be >= 1");
    c.resize(n);
    s.resize(n);
    for (int k = 0; k < n; ++k) {
        c[k] = std::cos(2.0 * kPi * k / n);
        s[k] = std::sin(2.0 * kPi * k / n);
    }
}

}  // namespace charkin
