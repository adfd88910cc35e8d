#pragma once

#include <stdexcept>
#include <utility>

#include "charkin/vec3.hpp"

namespace charkin {

/// Restitution coefficient e in (0,1] and the derived collision weights
/// a_plus = (1+e)/2, a_minus = (1-e)/2.  e = 1 is the elastic limit.
struct RestitutionParams {
    double e;
    double a_plus;
    double a_minus;

    explicit RestitutionParams(double e_) : e(e_), a_plus(0.5 * (1.0 + e_)), a_minus(0.5 * (1.0 - e_)) {
        if (!(e_ > 0.0) || !(e_ <= 1.0))
            throw std::invalid_argument("restitution e must lie in (0,1]");
    }
};

struct VelocityPair {
    Vec3 v;
    Vec3 v_star;
};

/// Unit direction on S^2; the constructor checks the normalization.
struct SphereDirection {
    Vec3 sigma;

    explicit SphereDirection(const Vec3& s) : sigma(s) {
        if (std::fabs(s.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("SphereDirection requires a unit vector");
    }
    static SphereDirection unchecked(const Vec3& s) {
        SphereDirection d{};
        d.sigma = s;
        return d;
    }

  private:
    SphereDirection() = default;
};

/// Post-collision velocities in the sigma parametrization:
///   v'  = (v+v*)/2 + (a-/2)(v-v*) + (a+/2)|v-v*| sigma
///   v*' = (v+v*)/2 - (a-/2)(v-v*) - (a+/2)|v-v*| sigma
/// Momentum v'+v*' = v+v* holds identically.
VelocityPair post_collision(const VelocityPair& pair, const SphereDirection& sigma,
                            const RestitutionParams& rp);

/// Pre-collision velocities ('v, 'v*) whose collision produces (v, v*):
/// the 1/e-weighted variant of the formula above.  Rejects e = 0.
VelocityPair pre_collision(const VelocityPair& pair, const SphereDirection& sigma,
                           const RestitutionParams& rp);

/// Impact-direction (omega) parametrization:
///   v'  = v  - a+ [(v-v*).w] w
///   v*' = v* + a+ [(v-v*).w] w
/// Energy change is -(1-e^2)/2 [(v-v*).w]^2 <= 0.
VelocityPair omega_post_collision(const VelocityPair& pair, const SphereDirection& omega,
                                  const RestitutionParams& rp);

/// Fourier-side split of xi for the transformed gain term:
///   xi+ = (1/2 + a-/2) xi + (a+/2)|xi| sigma
///   xi- = (1/2 - a-/2) xi - (a+/2)|xi| sigma
/// xi+ + xi- = xi identically; xi = 0 maps to (0, 0).
std::pair<Vec3, Vec3> xi_split(const Vec3& xi, const Vec3& sigma, const RestitutionParams& rp);

Vec3 xi_plus(const Vec3& xi, const SphereDirection& sigma, const RestitutionParams& rp);
Vec3 xi_minus(const Vec3& xi, const SphereDirection& sigma, const RestitutionParams& rp);

/// Orthonormal frame attached to a velocity pair:
///   q_hat = (v-v*)/|v-v*|, j_hat = (v x v*)/|v x v*|, h_hat = j_hat x q_hat,
/// so that sigma = q_hat cos(t) + h_hat sin(t)cos(p) + j_hat sin(t)sin(p).
/// degenerate = true when v ~ v* or v x v* ~ 0; the frame then falls back to an
/// arbitrary orthonormal completion (azimuth-symmetric integrals do not care).
struct SphereBasis {
    Vec3 q_hat;
    Vec3 h_hat;
    Vec3 j_hat;
    bool degenerate = false;
};

SphereBasis sphere_basis(const VelocityPair& pair);

/// Frame (q_hat, e1, e2) for an arbitrary nonzero axis; used for quadrature
/// about a Fourier node.
SphereBasis axis_basis(const Vec3& axis);

}  // namespace charkin
