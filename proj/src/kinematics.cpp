#include "charkin/kinematics.hpp"

namespace charkin {

VelocityPair post_collision(const VelocityPair& pair, const SphereDirection& sigma,
                            const RestitutionParams& rp) {
    const Vec3 center = 0.5 * (pair.v + pair.v_star);
    const Vec3 u = pair.v - pair.v_star;
    const double un = u.norm();
    if (un == 0.0) return pair;  // coincident velocities: collision is the identity
    const Vec3 shift = 0.5 * rp.a_minus * u + 0.5 * rp.a_plus * un * sigma.sigma;
    return {center + shift, center - shift};
}

VelocityPair pre_collision(const VelocityPair& pair, const SphereDirection& sigma,
                           const RestitutionParams& rp) {
    if (!(rp.e > 0.0)) throw std::invalid_argument("pre_collision requires e > 0");
    const Vec3 center = 0.5 * (pair.v + pair.v_star);
    const Vec3 u = pair.v - pair.v_star;
    const double un = u.norm();
    if (un == 0.0) return pair;
    const double inv4e = 1.0 / (4.0 * rp.e);
    const Vec3 shift = -(1.0 - rp.e) * inv4e * u + (1.0 + rp.e) * inv4e * un * sigma.sigma;
    return {center + shift, center - shift};
}

VelocityPair omega_post_collision(const VelocityPair& pair, const SphereDirection& omega,
                                  const RestitutionParams& rp) {
    const Vec3 u = pair.v - pair.v_star;
    const Vec3 kick = rp.a_plus * u.dot(omega.sigma) * omega.sigma;
    return {pair.v - kick, pair.v_star + kick};
}

std::pair<Vec3, Vec3> xi_split(const Vec3& xi, const Vec3& sigma, const RestitutionParams& rp) {
    const double xin = xi.norm();
    if (xin == 0.0) return {Vec3{}, Vec3{}};
    const Vec3 s = 0.5 * rp.a_plus * xin * sigma;
    const Vec3 plus = (0.5 + 0.5 * rp.a_minus) * xi + s;
    return {plus, xi - plus};
}

Vec3 xi_plus(const Vec3& xi, const SphereDirection& sigma, const RestitutionParams& rp) {
    return xi_split(xi, sigma.sigma, rp).first;
}

Vec3 xi_minus(const Vec3& xi, const SphereDirection& sigma, const RestitutionParams& rp) {
    return xi_split(xi, sigma.sigma, rp).second;
}

namespace {
constexpr double kDegenerateTol = 1e-12;
}

SphereBasis sphere_basis(const VelocityPair& pair) {
    const Vec3 u = pair.v - pair.v_star;
    const double un = u.norm();
    const Vec3 c = pair.v.cross(pair.v_star);
    const double cn = c.norm();
    if (un <= kDegenerateTol || cn <= kDegenerateTol * std::max(1.0, pair.v.norm() * pair.v_star.norm())) {
        // Collinear or coincident pair: any orthonormal completion serves.
        SphereBasis b = axis_basis(un > kDegenerateTol ? u : Vec3{0, 0, 1});
        b.degenerate = true;
        return b;
    }
    SphereBasis b;
    b.q_hat = u / un;
    b.j_hat = c / cn;
    b.h_hat = b.j_hat.cross(b.q_hat);
    return b;
}

SphereBasis axis_basis(const Vec3& axis) {
    SphereBasis b;
    b.q_hat = axis.normalized();
    b.h_hat = any_orthogonal(axis);
    b.j_hat = b.q_hat.cross(b.h_hat);
    return b;
}

}  // namespace charkin
