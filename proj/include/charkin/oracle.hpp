#pragma once

#include <functional>
#include <string>

#include "charkin/charfn.hpp"
#include "charkin/collision_rules.hpp"
#include "charkin/kernels.hpp"
#include "charkin/kinematics.hpp"
#include "charkin/solver.hpp"

namespace charkin {

/// Test function psi with an analytic gradient (the weak form needs both).
struct TestFunction {
    enum class Tag { Constant, Coordinate, Energy, Weighted, Custom };
    Tag tag = Tag::Custom;
    int coordinate = 0;  // for Tag::Coordinate
    std::string name;
    std::function<double(const Vec3&)> psi;
    std::function<Vec3(const Vec3&)> grad;
};

TestFunction tf_constant();
TestFunction tf_coordinate(int j);
TestFunction tf_energy();
TestFunction tf_weighted(double l);  // <v>^l = (1+|v|^2)^{l/2}
TestFunction tf_custom(std::string name, std::function<double(const Vec3&)> psi,
                       std::function<Vec3(const Vec3&)> grad);

/// max relative defect of grad against central differences at v.
double tf_gradient_defect(const TestFunction& tf, const Vec3& v, double h = 1e-5);

/// Kinetic kernel factor Phi(|v - v*|).
using KineticFn = std::function<double(double)>;
KineticFn kinetic_power(double gamma);  // raw |u|^gamma (singular at u = 0)
KineticFn kinetic_from_cutoff(const KineticCutoff& kc);

/// Sphere integral of b (Phi) [psi(v*') + psi(v') - psi(v*) - psi(v)] using
/// the shared angular rule in the pair frame.  Raw kernels reject v == v*.
double L_e_B(const TestFunction& tf, const Vec3& v, const Vec3& v_star, const AngularRule& rule,
             int n_azimuth, const KineticFn& kinetic, const RestitutionParams& rp);

/// Grazing-compensated variant: the integrand subtracts
///   a+ (|u|/2) [grad psi(v) - grad psi(v*)] . [(sigma.q)q - sigma],
/// which integrates to zero exactly, leaving an O(theta^2) integrand that an
/// adaptive theta quadrature handles for the raw (non-cutoff) kernel.
double compensated_L(const TestFunction& tf, const Vec3& v, const Vec3& v_star,
                     const AngularKernel& b, const KineticFn& kinetic,
                     const RestitutionParams& rp, int n_azimuth = 8, double tol = 1e-9,
                     int max_panels = 60, bool* converged = nullptr);

/// Instantaneous weak-form collision functional on a discrete measure:
/// (1/2) sum_{i != j} w_i w_j L_e_B(psi; v_i, v_j).
double weak_rhs(const DiscreteMeasure& F, const TestFunction& tf, const AngularRule& rule,
                int n_azimuth, const KineticFn& kinetic, const RestitutionParams& rp);

/// Gain-term transform identity check: velocity-side sphere quadrature of the
/// exponential test function against the Fourier-side quadrature with the
/// exact characteristic function of F.
///
/// The zeta integral of the Fourier side is evaluated per pair distance by
/// the radial (sinc-reduced) quadrature over the ball |zeta| <= Z — the
/// spherical factor of an exponential sum is exact, and a 3D ball rule cannot
/// resolve the oscillation at useful Z.  The ball variant below keeps the
/// honest 3D rule for cross-validation at small Z.
struct GainCheckResult {
    Complex lhs;      // velocity-space gain
    Complex rhs;      // Fourier-space gain
    double rel_gap;   // |lhs - rhs| / max(|lhs|, |rhs|)
};

GainCheckResult gain_term_fourier_check(const DiscreteMeasure& F, const Vec3& xi,
                                        const AngularRule& rule, int n_azimuth,
                                        const KineticCutoff& kc, double Z,
                                        const RestitutionParams& rp);

GainCheckResult gain_term_fourier_check_ball3d(const DiscreteMeasure& F, const Vec3& xi,
                                               const AngularRule& rule, int n_azimuth,
                                               const KineticCutoff& kc, const ZetaRule& zeta,
                                               const RestitutionParams& rp);

/// Weak-form time-derivative cross-check: weak_rhs(F0, psi) against the
/// Richardson-extrapolated solver slope [moment(dt) - moment(0)] / dt.
struct TimeDerivativeCheck {
    double weak_value = 0.0;
    double solver_slope = 0.0;
    double abs_gap = 0.0;
    double rel_gap = 0.0;
};

TimeDerivativeCheck crosscheck_time_derivative(const DiscreteMeasure& F0,
                                               const TestFunction& tf,
                                               const RestitutionParams& rp,
                                               const KernelConfig& kernel, SolverConfig cfg,
                                               double dt);

}  // namespace charkin
