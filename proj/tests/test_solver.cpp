#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "charkin/moment_traces.hpp"
#include "charkin/solver.hpp"

using namespace charkin;

namespace {

KernelConfig test_kernel() {
    KernelConfig kc;
    kc.gamma = -1.0;
    kc.s = 0.25;
    kc.K = 1.0;
    kc.n = 8;
    kc.r = 2.0;
    return kc;
}

SolverConfig small_radial() {
    SolverConfig cfg;
    cfg.R_eval = 3.0;
    cfg.Z = 8.0;
    cfg.radial_h = 0.05;
    cfg.sphere_polar = 10;
    cfg.zeta_radial = 12;
    cfg.zeta_polar = 10;
    cfg.zeta_azimuth = 6;
    cfg.backend = Backend::Serial;
    cfg.export_R = 2.0;
    cfg.export_M = 21;
    return cfg;
}

SolverConfig small_grid() {
    SolverConfig cfg;
    cfg.R_eval = 1.2;
    cfg.grid_M = 43;
    cfg.sphere_polar = 8;
    cfg.sphere_azimuth = 6;
    cfg.zeta_radial = 10;
    cfg.zeta_polar = 8;
    cfg.zeta_azimuth = 6;
    cfg.backend = Backend::Serial;
    cfg.export_R = 1.0;
    cfg.export_M = 17;
    return cfg;
}

DiscreteMeasure delta0() {
    DiscreteMeasure F;
    F.w = {1.0};
    F.v = {{0, 0, 0}};
    return F;
}

DiscreteMeasure three_point() {
    DiscreteMeasure F;
    F.w = {0.5, 0.3, 0.2};
    F.v = {{0.6, 0.1, -0.2}, {-0.5, 0.3, 0.1}, {-0.75, -0.7, 0.35}};
    const Vec3 m = F.mean();
    for (Vec3& v : F.v) v -= m;
    return F;
}

}  // namespace

TEST_CASE("config validation") {
    SolverConfig cfg = small_radial();
    CHECK_NOTHROW(cfg.validate());
    cfg.grid_M = 40;  // must be odd
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_radial();
    cfg.zeta_azimuth = 5;  // antipodal symmetry needs an even count
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_radial();
    cfg.interval_safety = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("constant state is a fixed point of the Picard operator") {
    SolverConfig cfg = small_grid();
    cfg.T_final = 0.3;
    const RestitutionParams rp(0.8);
    Solver solver(Datum::discrete(delta0()), rp, test_kernel(), cfg);

    // P[1] = 1: one Picard application of the constant path has zero residual,
    // and P[phi](0) = phi_0 by construction.
    const std::vector<double> profile = solver.picard_residual_profile(0.1);
    CHECK(profile.front() == 0.0);
    for (double r : profile) REQUIRE(r < 1e-13);

    const RunResult run = solver.solve();
    CHECK(run.completed);
    for (const IntervalResult& iv : run.intervals) REQUIRE(iv.iterations == 1);
    double defect = 0.0;
    for (const Complex& c : run.terminal.data())
        defect = std::max(defect, std::abs(c - Complex{1.0, 0.0}));
    CHECK(defect < 1e-12);
}

TEST_CASE("gaussian radial run: invariants and dissipation") {
    SolverConfig cfg = small_radial();
    cfg.T_final = 0.2;
    const RestitutionParams rp(0.8);
    Solver solver(Datum::gaussian(1.0), rp, test_kernel(), cfg);
    const RunResult run = solver.solve();
    REQUIRE(run.completed);

    const MomentTrace tr = trace_moments(run);
    CHECK(tr.max_mass_defect < 1e-12);
    CHECK(tr.max_energy_increase <= 0.0);
    CHECK(tr.total_energy_drop > 0.0);
    CHECK(tr.energy.front() == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(solver.hermitian_defect() == 0.0);

    double max_mod = 0.0;
    for (const IntervalResult& iv : run.intervals)
        for (double v : iv.max_abs) max_mod = std::max(max_mod, v);
    CHECK(max_mod <= 1.0 + 1e-9);

    // Picard residuals decrease geometrically.
    for (const IntervalResult& iv : run.intervals)
        for (std::size_t k = 1; k < iv.history.size(); ++k)
            REQUIRE(iv.history[k].residual < 0.9 * iv.history[k - 1].residual);
}

TEST_CASE("interval splitting is self-consistent") {
    SolverConfig cfg = small_radial();
    const RestitutionParams rp(0.8);
    const double T = 0.12;

    Solver one(Datum::gaussian(1.0), rp, test_kernel(), cfg);
    const IntervalResult full = one.solve_interval(0.0, T);
    REQUIRE(full.converged);

    Solver two(Datum::gaussian(1.0), rp, test_kernel(), cfg);
    REQUIRE(two.solve_interval(0.0, 0.5 * T).converged);
    REQUIRE(two.solve_interval(0.5 * T, 0.5 * T).converged);

    const CharGrid a = one.export_state(2.0, 21);
    const CharGrid b = two.export_state(2.0, 21);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        diff = std::max(diff, std::abs(a.data()[k] - b.data()[k]));
    CHECK(diff < 5e-7);  // combined Picard tolerances and time-quadrature error
}

TEST_CASE("T_final = 0 returns the initial datum") {
    SolverConfig cfg = small_radial();
    cfg.T_final = 0.0;
    const RestitutionParams rp(0.9);
    const RunResult run = run_solver(Datum::gaussian(1.0), rp, test_kernel(), cfg);
    CHECK(run.completed);
    CHECK(run.intervals.empty());
    double diff = 0.0;
    for (std::size_t k = 0; k < run.terminal.size(); ++k)
        diff = std::max(diff, std::abs(run.terminal.data()[k] - run.initial.data()[k]));
    CHECK(diff == 0.0);
}

TEST_CASE("serial and OpenMP sweeps are bitwise identical") {
    const RestitutionParams rp(0.8);
    {
        SolverConfig cfg = small_radial();
        cfg.backend = Backend::Serial;
        Solver a(Datum::gaussian(1.0), rp, test_kernel(), cfg);
        cfg.backend = Backend::OpenMP;
        Solver b(Datum::gaussian(1.0), rp, test_kernel(), cfg);
        const auto pa = a.picard_residual_profile(0.05);
        const auto pb = b.picard_residual_profile(0.05);
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i)
            REQUIRE(std::memcmp(&pa[i], &pb[i], sizeof(double)) == 0);
    }
    {
        SolverConfig cfg = small_grid();
        cfg.backend = Backend::Serial;
        Solver a(Datum::discrete(three_point()), rp, test_kernel(), cfg);
        cfg.backend = Backend::OpenMP;
        Solver b(Datum::discrete(three_point()), rp, test_kernel(), cfg);
        const auto pa = a.picard_residual_profile(0.05);
        const auto pb = b.picard_residual_profile(0.05);
        for (std::size_t i = 0; i < pa.size(); ++i)
            REQUIRE(std::memcmp(&pa[i], &pb[i], sizeof(double)) == 0);
    }
}

TEST_CASE("contraction estimate: stability and Picard ratios below one") {
    SolverConfig cfg = small_radial();
    const RestitutionParams rp(0.8);
    Solver solver(Datum::gaussian(1.0), rp, test_kernel(), cfg);

    const double c4 = solver.estimate_contraction(4, 42);
    const double c8 = solver.estimate_contraction(8, 42);
    const double rate4 = solver.A_eff() + c4;
    const double rate8 = solver.A_eff() + c8;
    CHECK(std::fabs(rate8 - rate4) <= 0.2 * rate4);

    const double T = 0.5 / rate8;
    for (int seed = 0; seed < 10; ++seed) {
        const double ratio = solver.picard_pair_ratio(T, 1000 + seed);
        REQUIRE(ratio <= rate8 * T * (1.0 + 1e-9));
        REQUIRE(ratio < 1.0);
    }
}

TEST_CASE("radial and grid engines agree on a gaussian datum") {
    const RestitutionParams rp(0.8);
    KernelConfig kc = test_kernel();

    SolverConfig rcfg = small_radial();
    rcfg.T_final = 0.05;
    Solver radial(Datum::gaussian(1.0), rp, kc, rcfg);
    const RunResult rrun = radial.solve();
    REQUIRE(rrun.completed);

    SolverConfig gcfg = small_radial();
    gcfg.T_final = 0.05;
    gcfg.mode = SolverMode::Grid3D;
    gcfg.grid_M = 81;
    gcfg.R_eval = 1.5;
    gcfg.Z = 8.0;
    gcfg.far_field_closure = false;
    Solver grid(Datum::gaussian(1.0), rp, kc, gcfg);
    const RunResult grun = grid.solve();
    REQUIRE(grun.completed);

    const Moments mr = radial.current_moments();
    const Moments mg = grid.current_moments();
    CHECK(mr.energy == doctest::Approx(mg.energy).epsilon(5e-3));
    CHECK(mg.momentum.norm() < 1e-4);

    // Pointwise agreement of the evolved states inside the common region;
    // the tolerance reflects the trilinear representation error of the 3D
    // mode at this resolution (h^2 phi''/8), not a dynamics discrepancy.
    double diff = 0.0;
    for (double x : {0.2, 0.5, 0.9}) {
        const Vec3 xi{x, -0.3 * x, 0.2};
        diff = std::max(diff, std::abs(radial.eval_state(xi) - grid.eval_state(xi)));
    }
    CHECK(diff < 3e-2);
}

TEST_CASE("cutoff sequence on the trivial datum") {
    SolverConfig cfg = small_grid();
    cfg.T_final = 0.02;
    const RestitutionParams rp(0.8);
    const CutoffSequenceResult seq =
        noncutoff_sequence(Datum::discrete(delta0()), rp, test_kernel(), cfg, {4, 8});
    REQUIRE(seq.terminals.size() == 2);
    CHECK(seq.sup_differences.size() == 1);
    CHECK(seq.sup_differences[0] < 1e-12);
    CHECK_THROWS_AS(
        noncutoff_sequence(Datum::discrete(delta0()), rp, test_kernel(), cfg, {8, 4}),
        std::invalid_argument);
}

TEST_CASE("levy datum: run completes, energy flagged non-finite, fractional trace") {
    SolverConfig cfg = small_radial();
    cfg.T_final = 0.05;
    cfg.trace_fractional_orders = {0.5, 1.4};
    cfg.fractional_delta = 0.05;
    const RestitutionParams rp(0.8);
    Solver solver(Datum::levy(1.5), rp, test_kernel(), cfg);
    const RunResult run = solver.solve();
    REQUIRE(run.completed);

    const MomentTrace tr = trace_moments(run);
    CHECK(!tr.energy_finite.front());
    CHECK(tr.any_energy_nonfinite);
    REQUIRE(!tr.fractional_orders.empty());
    for (const auto& series : tr.fractional_values)
        for (double v : series) {
            REQUIRE(std::isfinite(v));
            REQUIRE(v > 0.0);
        }
}

TEST_CASE("solver rejects inconsistent configurations") {
    const RestitutionParams rp(0.8);
    SolverConfig cfg = small_radial();
    cfg.mode = SolverMode::Radial;
    CHECK_THROWS_AS(Solver(Datum::discrete(three_point()), rp, test_kernel(), cfg),
                    std::invalid_argument);

    SolverConfig gcfg = small_grid();
    gcfg.grid_M = 9;  // cannot cover the extraction stencil
    CHECK_THROWS_AS(Solver(Datum::discrete(three_point()), rp, test_kernel(), gcfg),
                    std::invalid_argument);
}
