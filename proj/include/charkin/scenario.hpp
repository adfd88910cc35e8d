#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "charkin/kernels.hpp"
#include "charkin/solver.hpp"

namespace charkin {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

/// A full run description: initial datum, collision parameters, solver
/// settings, requested check suites and reporting knobs.
struct Scenario {
    Datum datum = Datum::gaussian(1.0);
    double e = 1.0;
    KernelConfig kernel;
    SolverConfig solver;
    std::vector<std::string> checks;  // invariants | moments | dissipation | psd
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;

    // Check tolerances (defaults match the verification suite).
    double tol_mass = 1e-10;
    double tol_modulus = 1e-6;
    double tol_hermitian = 1e-10;
    double tol_momentum_drift = 1e-6;
    double tol_energy_step = 1e-8;     // per-step increase, relative to E(0)
    double min_energy_drop = 0.01;     // required total drop fraction, e < 1
    double tol_energy_elastic = 1e-4;  // |E(T)-E(0)|/E(0) at e = 1
    int psd_samples = 16;
    int psd_seeds = 20;
    double psd_tol = 1e-8;

    // Convergence studies.
    std::string study_axis = "cutoff-n";
    std::vector<double> study_levels;

    // Oracle cross-checks.
    double oracle_Z = 100.0;
    int oracle_xi = 10;
    double oracle_xi_scale = 2.0;
    double oracle_dt = 0.04;
    double oracle_gain_tol = 0.01;
    double oracle_cross_tol = 0.02;
};

/// Parses the scenario config (JSON); throws std::invalid_argument with the
/// parser's position message on malformed input.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

struct ScenarioOutcome {
    int exit_code = 0;  // 0 pass, 1 check failure, 2 config error, 3 non-convergence
    std::vector<CheckResult> checks;
    std::string summary_path;
};

ScenarioOutcome run_scenario(const Scenario& sc);
ScenarioOutcome run_study(const Scenario& sc);
ScenarioOutcome run_oracle_suite(const Scenario& sc);
ScenarioOutcome run_quick_suites(const Scenario& sc);

/// Self-contained verification batteries (also reused by the acceptance
/// suite); each returns one CheckResult per verified property.
std::vector<CheckResult> kinematics_battery(std::uint64_t seed);
std::vector<CheckResult> weights_battery(std::uint64_t seed);
std::vector<CheckResult> kernel_transform_battery(const KernelConfig& kernel);
std::vector<CheckResult> pd_battery(std::uint64_t seed);

}  // namespace charkin
