#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "charkin/charfn.hpp"
#include "charkin/collision_rules.hpp"
#include "charkin/kernels.hpp"
#include "charkin/kinematics.hpp"

namespace charkin {

enum class Backend { Serial, OpenMP };
enum class SolverMode { Auto, Radial, Grid3D };

/// Initial datum for a run.
struct Datum {
    enum class Kind { Discrete, Gaussian, Levy };
    Kind kind = Kind::Gaussian;
    DiscreteMeasure F;
    double variance = 1.0;
    double alpha = 1.5;

    bool isotropic() const { return kind != Kind::Discrete; }
    CharEval eval() const;

    static Datum discrete(DiscreteMeasure F);
    static Datum gaussian(double variance);
    static Datum levy(double alpha);
};

struct SolverConfig {
    double T_final = 1.0;
    int time_nodes = 8;        // trapezoid sub-intervals per Picard interval
    double picard_tol = 1e-8;
    int max_picard = 50;
    int sphere_polar = 16;
    int sphere_azimuth = 8;
    int zeta_radial = 20;
    int zeta_polar = 16;
    int zeta_azimuth = 8;
    double Z = 10.0;           // zeta-ball radius
    double R_eval = 2.0;       // evolved region: |xi| <= R_eval
    int grid_M = 81;           // nodes per axis (grid mode); R_grid is derived
    double radial_h = 0.05;    // state spacing (radial mode)
    double norm_alpha = 2.0;   // alpha used for residuals and contraction
    double interval_safety = 0.5;  // T = safety / (A_eff + C_hat)
    int contraction_pairs = 8;
    std::uint64_t seed = 1;
    bool normalize_angular = true;
    bool far_field_closure = true;  // analytic tail closure for discrete data
    SolverMode mode = SolverMode::Auto;
    Backend backend = Backend::OpenMP;
    double export_R = 2.0;     // exported diagnostic grid (radial mode)
    int export_M = 33;
    std::vector<double> trace_fractional_orders;  // tracked at interval ends
    double fractional_delta = 0.05;

    void validate() const;
};

/// Geometric bound on |xi_e^+-| used to size the grid:
/// R_grid = c_geom * R_eval + Z + padding.
double xi_geometry_factor(const RestitutionParams& rp);

struct PicardLog {
    int iteration = 0;
    double residual = 0.0;   // sup-t alpha-norm distance of successive iterates
    double wall_ms = 0.0;
};

/// One Picard interval: state snapshots at the trapezoid time nodes.
struct IntervalResult {
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> times;      // absolute times of the m+1 nodes
    std::vector<Moments> moments;   // per node
    std::vector<double> mass_defect;   // |phi(t,0) - 1|
    std::vector<double> max_abs;       // max node |phi|
    std::vector<PicardLog> history;
    std::vector<double> fractional_orders;  // copied from the config
    std::vector<double> fractional_t1;      // fractional moments at t1
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
};

struct RunResult {
    std::vector<IntervalResult> intervals;
    CharGrid initial{1.0, 3};
    CharGrid terminal{1.0, 3};
    double A = 0.0;       // sup |Phi_c|
    double mass_b = 0.0;  // sphere quadrature of the angular kernel in use
    double A_eff = 0.0;   // mass_b * A
    double C_hat = 0.0;   // empirical contraction constant
    double T_interval = 0.0;
    bool completed = false;
    std::string failure;

    /// Flattened (t, moments) trace over all intervals (node 0 of interval k
    /// duplicates the terminal node of interval k-1 and is skipped).
    std::vector<std::pair<double, Moments>> trace() const;
};

namespace detail {
class EngineBase;
}

/// Fixed-point solver for the cutoff equation in the characteristic
/// representation: d/dt phi + A_eff phi = G1[phi] + G2[phi], integrated by
/// Picard iteration of the exponential-integral form on intervals
/// T < 1/(A_eff + C_hat).
class Solver {
  public:
    Solver(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kernel,
           const SolverConfig& cfg);
    ~Solver();

    double A() const;
    double A_eff() const;
    double mass_b() const;
    double zeta_tail_estimate() const;  // |hat| tail mass beyond Z (diagnostic)

    /// Empirical contraction constant: max over random characteristic pairs of
    /// the alpha-norm ratio ||G[phi]-G[phi~]|| / ||phi-phi~||, minus A_eff.
    double estimate_contraction(int pair_count, std::uint64_t seed) const;

    /// Picard-map contraction ratio for one random pair of characteristic
    /// functions sharing an initial datum (constant-in-time paths).
    double picard_pair_ratio(double T, std::uint64_t seed) const;

    /// One application of the Picard operator to a constant-extension path of
    /// the current initial datum; returns per-node sup distances (testing aid).
    std::vector<double> picard_residual_profile(double T);

    IntervalResult solve_interval(double t0, double T);
    RunResult solve();

    /// Evaluate the evolved state anywhere inside the lookup domain.
    Complex eval_state(const Vec3& xi) const;
    CharGrid export_state(double R, int M) const;
    CharGrid export_state() const;  // config export geometry (grid mode: native grid)

    Moments current_moments() const;
    double current_norm(double alpha) const;      // grid sup ||phi - 1||_alpha
    double hermitian_defect() const;              // exported-state defect
    RadialAverage current_radial_average() const; // for fractional moments

    const SolverConfig& config() const;

  private:
    std::unique_ptr<detail::EngineBase> engine_;
};

/// Full run per configuration (contraction estimate, interval chaining).
RunResult run_solver(const Datum& datum, const RestitutionParams& rp,
                     const KernelConfig& kernel, const SolverConfig& cfg);

/// Cutoff-sequence study: one run per angular level n (kernels un-normalized
/// so the sequence approaches the non-cutoff dynamics), reporting terminal
/// grids and sup differences between consecutive levels.
struct CutoffSequenceResult {
    std::vector<int> levels;
    std::vector<RunResult> runs;
    std::vector<CharGrid> terminals;      // common export geometry
    std::vector<double> sup_differences;  // ||phi^{n_i} - phi^{n_{i+1}}||_inf
};

CutoffSequenceResult noncutoff_sequence(const Datum& datum, const RestitutionParams& rp,
                                        KernelConfig kernel, SolverConfig cfg,
                                        const std::vector<int>& n_list);

}  // namespace charkin
