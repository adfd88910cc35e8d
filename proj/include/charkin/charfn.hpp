#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "charkin/vec3.hpp"

namespace charkin {

using Complex = std::complex<double>;

/// Weighted point masses in velocity space; weights sum to one.
struct DiscreteMeasure {
    std::vector<double> w;
    std::vector<Vec3> v;

    void validate() const;
    Vec3 mean() const;
    double energy() const;                    // sum w_j |v_j|^2
    double abs_moment(double alpha) const;    // sum w_j |v_j|^alpha
};

DiscreteMeasure random_discrete_measure(std::mt19937_64& rng, int npoints, double vscale,
                                        bool zero_mean = false);

/// Pointwise characteristic-function evaluator phi(xi).
using CharEval = std::function<Complex(const Vec3&)>;

CharEval make_discrete_eval(DiscreteMeasure F);
CharEval make_gaussian_eval(double variance);
CharEval make_levy_eval(double alpha);

/// Complex samples of phi on the uniform grid [-R, R]^3 with M nodes per
/// axis (M odd so the origin is a node).  Storage is row major with the z
/// index fastest: idx = (ix*M + iy)*M + iz.
class CharGrid {
  public:
    CharGrid(double R, int M);

    double R() const { return R_; }
    int M() const { return M_; }
    double h() const { return h_; }
    int center() const { return (M_ - 1) / 2; }

    std::size_t size() const { return data_.size(); }
    std::size_t index(int ix, int iy, int iz) const {
        return (std::size_t(ix) * M_ + iy) * M_ + iz;
    }
    Vec3 node(int ix, int iy, int iz) const {
        return {-R_ + h_ * ix, -R_ + h_ * iy, -R_ + h_ * iz};
    }
    Complex at(int ix, int iy, int iz) const { return data_[index(ix, iy, iz)]; }
    void set(int ix, int iy, int iz, Complex v) { data_[index(ix, iy, iz)] = v; }
    const std::vector<Complex>& data() const { return data_; }
    std::vector<Complex>& data() { return data_; }

    bool contains(const Vec3& xi) const {
        return std::fabs(xi.x) <= R_ && std::fabs(xi.y) <= R_ && std::fabs(xi.z) <= R_;
    }

    /// Trilinear interpolation; throws std::out_of_range outside [-R, R]^3
    /// (out-of-grid lookups are a configuration error, never clamped).
    Complex interp(const Vec3& xi) const;

    Complex at_origin() const { return at(center(), center(), center()); }
    double max_abs() const;
    double hermitian_defect() const;  // max |phi(-xi) - conj(phi(xi))| over nodes

    /// Enforce phi(-xi) = conj(phi(xi)) exactly by mirroring the upper half.
    void enforce_hermitian();

    static CharGrid sample(const CharEval& phi, double R, int M);

  private:
    double R_;
    int M_;
    double h_;
    std::vector<Complex> data_;
};

CharGrid from_measure(const DiscreteMeasure& F, double R, int M);
CharGrid gaussian_char(double variance, double R, int M);
CharGrid levy_char(double alpha, double R, int M);

/// Grid sup of |phi(xi) - 1| / |xi|^alpha over nonzero nodes.
double knorm(const CharGrid& phi, double alpha);

/// Grid sup of |phi - psi| / |xi|^alpha over nonzero nodes (same geometry).
double kdistance(const CharGrid& phi, const CharGrid& psi, double alpha);

/// Bochner positive-definiteness probe: Gram matrix of phi at k random point
/// differences, smallest eigenvalue of the Hermitian part.
struct PsdVerdict {
    bool psd = false;
    double min_eigenvalue = 0.0;
    double hermitian_defect = 0.0;
};

PsdVerdict check_positive_definite(const CharEval& phi, int sample_count, std::uint64_t seed,
                                   double sample_radius, double tol_per_point = 1e-8);

/// Residuals of the positive-definite-function inequalities; all are >= 0
/// (up to rounding) for genuine characteristic functions.
struct PdResiduals {
    double r1;  // 2(1 - Re phi(xi-eta)) - |phi(xi) - phi(eta)|^2
    double r2;  // (1-|phi(xi)|^2)(1-|phi(eta)|^2) - |phi(xi)phi(eta) - phi(xi+eta)|^2
    double r3;  // ||phi-1||_a (4|xi|^{a/2}|eta|^{a/2} + |eta|^a) - |phi(xi) - phi(xi+eta)|
};

PdResiduals pd_inequality_residuals(const CharEval& phi, const Vec3& xi, const Vec3& eta,
                                    double alpha, double norm_alpha);

/// Mass, momentum and energy from derivatives of phi at the origin
/// (node-aligned central differences with Richardson refinement).
struct Moments {
    double mass = 0.0;
    Vec3 momentum{};
    double energy = 0.0;
    bool energy_finite = true;
};

Moments moments_from_char(const CharGrid& phi);

/// Fractional moment of order alpha in (0,2) recovered from
///   (1/c_alpha) int_{delta <= |xi| <= 1/delta} (1 - Re phi)/|xi|^{3+alpha} dxi,
/// with c_alpha calibrated against a reference point mass (|v| = 2).
/// The integrand enters through its spherical average:
///   avg(rho) = mean over the sphere of radius rho of (1 - Re phi).
struct RadialAverage {
    std::function<double(double)> avg;
    double osc_scale = 0.0;  // largest oscillation frequency in rho (0 = smooth)
    double rho_cap = 0.0;    // 0 = unlimited; grids cap at their radius
};

RadialAverage radial_average(const DiscreteMeasure& F);
RadialAverage radial_average_gaussian(double variance);
RadialAverage radial_average_levy(double alpha);
RadialAverage radial_average_grid(const CharGrid& phi, int sphere_order = 12);

double fractional_moment(const RadialAverage& f, double alpha, double delta);

/// The raw truncated integral (before calibration); exposed for tests.
double fractional_moment_integral(const RadialAverage& f, double alpha, double delta);

}  // namespace charkin
