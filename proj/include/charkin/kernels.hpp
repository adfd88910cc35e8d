#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace charkin {

/// Collision-kernel parameters: B = Phi(|v-v*|) b(cos theta) with
/// Phi(rho) = rho^gamma, -2 <= gamma < 0, and an angular part behaving like
/// K theta^(-1-2s)/sin(theta) near grazing.  n is the angular cutoff level,
/// r > 1 the kinetic-cutoff support parameter, N the decay order used in
/// transform checks, alpha0 the angular integrability exponent (> 2s).
struct KernelConfig {
    double gamma = -1.0;
    double s = 0.25;
    double K = 1.0;
    int n = 8;
    double r = 2.0;
    int N = 2;
    double alpha0 = 0.6;

    void validate() const {
        if (!(gamma >= -2.0 && gamma < 0.0))
            throw std::invalid_argument("kernel: gamma out of [-2,0)");
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kernel: s out of (0,1)");
        if (!(K > 0.0)) throw std::invalid_argument("kernel: K must be positive");
        if (n < 2) throw std::invalid_argument("kernel: cutoff level n must be >= 2");
        if (!(r > 1.0)) throw std::invalid_argument("kernel: support parameter r must be > 1");
        if (N < 1) throw std::invalid_argument("kernel: decay order N must be >= 1");
        if (!(alpha0 > 2.0 * s && alpha0 <= 2.0))
            throw std::invalid_argument("kernel: alpha0 must lie in (2s, 2]");
    }
};

/// Angular kernel b(cos theta) = K theta^(-1-2s)/sin(theta) on (0, pi/2]
/// (symmetrized domain), optionally capped at a finite level n.
class AngularKernel {
  public:
    static constexpr double kUncut = std::numeric_limits<double>::infinity();

    AngularKernel(double K, double s, double level);

    double K() const { return K_; }
    double s() const { return s_; }
    double level() const { return level_; }
    bool is_cutoff() const { return std::isfinite(level_); }

    /// b_n(cos theta) for t = cos theta in [0, 1). t -> 1 is the grazing limit.
    double eval_cos(double t) const;
    double eval_theta(double theta) const;

    /// cos of the angle where the cap takes over (1.0 when the kernel is
    /// capped everywhere, 0.0-side handled by eval); only for cutoff kernels.
    double kink_cos() const { return kink_cos_; }

    /// Exact sphere integral of b_n over the symmetrized domain
    /// (closed form for this model kernel; infinite for the raw kernel).
    double sphere_mass_exact() const;

  private:
    double K_;
    double s_;
    double level_;
    double kink_theta_ = 0.0;  // b(theta) > level for theta < kink_theta_
    double kink_cos_ = 1.0;
};

AngularKernel make_angular(const KernelConfig& cfg);
AngularKernel cutoff_angular(const AngularKernel& b, double n);

/// Polar quadrature rule for the hemisphere integral
///   int_{S^2} b(xi_hat . sigma) F(sigma) dsigma
///   = sum_i wb[i] * mean_over_azimuth F(sigma(t_i, psi)),
/// with Gauss-Legendre nodes in t = cos theta on [0,1], split at the cutoff
/// kink so the kernel is smooth on each panel.  wb absorbs the 2*pi azimuth
/// measure and the kernel values; when normalized, sum(wb) == 1 exactly at
/// the rule level.
struct AngularRule {
    std::vector<double> t;
    std::vector<double> wb;
    double mass = 0.0;  // rule quadrature of the un-normalized kernel
    bool normalized = false;
};

AngularRule make_angular_rule(const AngularKernel& b, int polar_order, bool normalize);

/// Normalized copy of a rule (sphere integral scaled to one).
AngularRule normalize_angular(const AngularRule& rule);

/// Kinetic cutoff Phi_c(rho) = rho^gamma phi_c(rho): phi_c is a C^inf bump,
/// 1 on [1/r, r], supported on [1/(2r), 2r].  The radial Fourier transform
/// hat(Phi_c) is tabulated on [0, Zmax] with monotone-cubic interpolation,
/// under the convention Phi_c(|q|) = int hat(zeta) exp(i zeta.q) dzeta.
class KineticCutoff {
  public:
    KineticCutoff(double gamma, double r, double table_zmax, double table_dz);

    double gamma() const { return gamma_; }
    double r() const { return r_; }
    double support_lo() const { return 0.5 / r_; }
    double support_hi() const { return 2.0 * r_; }

    double bump(double rho) const;      // phi_c
    double eval(double rho) const;      // Phi_c
    double sup_abs() const { return A_; }  // A = sup |Phi_c|

    double hat(double zeta_norm) const;  // interpolated hat(Phi_c)
    double hat_zero() const { return hat_.front(); }
    double table_zmax() const { return zmax_; }

    /// Relative radial tail mass of |hat| beyond Z:
    ///   int_Z^Zmax rho^2 |hat| / int_0^Zmax rho^2 |hat|.
    double tail_mass(double Z) const;

    /// Direct (non-tabulated) transform evaluation; the table is built from it.
    double hat_direct(double zeta_norm) const;

    /// Plane-wave transform over the ball |zeta| <= Z:
    ///   4 pi int_0^Z rho^2 hat(rho) sinc(rho u) drho,
    /// evaluated from the direct transform (no table error).  As Z -> inf this
    /// converges to Phi_c(u); the complement Phi_c(u) - ball_transform(u, Z)
    /// is the exact far-field remainder used to close truncated zeta integrals
    /// against plane waves.
    double ball_transform(double u, double Z) const;
    double tail_transform(double u, double Z) const { return eval(u) - ball_transform(u, Z); }

  private:
    double gamma_;
    double r_;
    double A_ = 0.0;
    double zmax_;
    double dz_;
    std::vector<double> hat_;     // samples at k*dz
    std::vector<double> slope_;   // Fritsch-Carlson slopes
    std::vector<double> tailcum_; // cumulative rho^2 |hat| from the right

    void build_table();
    void compute_sup();
};

KineticCutoff make_kinetic_cutoff(const KernelConfig& cfg, double table_zmax = 0.0,
                                  double table_dz = 0.05);

}  // namespace charkin
