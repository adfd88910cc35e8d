#include "charkin/scenario.hpp"

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "charkin/io.hpp"
#include "charkin/kinematics.hpp"
#include "charkin/moment_traces.hpp"
#include "charkin/oracle.hpp"
#include "charkin/quadrature.hpp"

namespace charkin {

using nlohmann::json;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    while (v.norm() < 1e-6) v = Vec3{g(rng), g(rng), g(rng)};
    return v.normalized();
}

Vec3 random_vec(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

Datum datum_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "gaussian") return Datum::gaussian(j.at("variance").get<double>());
    if (type == "levy") return Datum::levy(j.at("alpha").get<double>());
    if (type == "discrete") {
        DiscreteMeasure F;
        F.w = j.at("weights").get<std::vector<double>>();
        for (const auto& row : j.at("velocities")) {
            if (row.size() != 3) throw std::invalid_argument("datum: velocities must be 3-vectors");
            F.v.push_back(Vec3{row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
        return Datum::discrete(std::move(F));
    }
    throw std::invalid_argument("datum: unknown type '" + type + "'");
}

void solver_from_json(const json& j, SolverConfig& cfg) {
    cfg.T_final = j.value("T_final", cfg.T_final);
    cfg.time_nodes = j.value("time_nodes", cfg.time_nodes);
    cfg.picard_tol = j.value("picard_tol", cfg.picard_tol);
    cfg.max_picard = j.value("max_picard", cfg.max_picard);
    cfg.sphere_polar = j.value("sphere_polar", cfg.sphere_polar);
    cfg.sphere_azimuth = j.value("sphere_azimuth", cfg.sphere_azimuth);
    cfg.zeta_radial = j.value("zeta_radial", cfg.zeta_radial);
    cfg.zeta_polar = j.value("zeta_polar", cfg.zeta_polar);
    cfg.zeta_azimuth = j.value("zeta_azimuth", cfg.zeta_azimuth);
    cfg.Z = j.value("Z", cfg.Z);
    cfg.R_eval = j.value("R_eval", cfg.R_eval);
    cfg.grid_M = j.value("grid_M", cfg.grid_M);
    cfg.radial_h = j.value("radial_h", cfg.radial_h);
    cfg.norm_alpha = j.value("norm_alpha", cfg.norm_alpha);
    cfg.interval_safety = j.value("interval_safety", cfg.interval_safety);
    cfg.contraction_pairs = j.value("contraction_pairs", cfg.contraction_pairs);
    cfg.normalize_angular = j.value("normalize_angular", cfg.normalize_angular);
    cfg.far_field_closure = j.value("far_field_closure", cfg.far_field_closure);
    cfg.export_R = j.value("export_R", cfg.export_R);
    cfg.export_M = j.value("export_M", cfg.export_M);
    cfg.trace_fractional_orders =
        j.value("trace_fractional_orders", cfg.trace_fractional_orders);
    cfg.fractional_delta = j.value("fractional_delta", cfg.fractional_delta);
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "auto") cfg.mode = SolverMode::Auto;
        else if (m == "radial") cfg.mode = SolverMode::Radial;
        else if (m == "grid3d") cfg.mode = SolverMode::Grid3D;
        else throw std::invalid_argument("solver: unknown mode '" + m + "'");
    }
    if (j.contains("backend")) {
        const std::string b = j.at("backend").get<std::string>();
        if (b == "serial") cfg.backend = Backend::Serial;
        else if (b == "omp") cfg.backend = Backend::OpenMP;
        else throw std::invalid_argument("solver: unknown backend '" + b + "'");
    }
}

json check_to_json(const CheckResult& c) {
    json j;
    j["name"] = c.name;
    j["measured"] = c.measured;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

void write_summary(const std::string& path, const std::vector<CheckResult>& checks,
                   const json& extra) {
    json j;
    j["checks"] = json::array();
    for (const CheckResult& c : checks) j["checks"].push_back(check_to_json(c));
    j["run"] = extra;
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

int exit_code_from(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (!c.pass) return 1;
    return 0;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }

    Scenario sc;
    try {
        if (j.contains("datum")) sc.datum = datum_from_json(j.at("datum"));
        if (j.contains("restitution")) sc.e = j.at("restitution").at("e").get<double>();
        if (j.contains("kernel")) {
            const json& k = j.at("kernel");
            sc.kernel.gamma = k.value("gamma", sc.kernel.gamma);
            sc.kernel.s = k.value("s", sc.kernel.s);
            sc.kernel.K = k.value("K", sc.kernel.K);
            sc.kernel.n = k.value("n", sc.kernel.n);
            sc.kernel.r = k.value("r", sc.kernel.r);
            sc.kernel.N = k.value("N", sc.kernel.N);
            sc.kernel.alpha0 = k.value("alpha0", sc.kernel.alpha0);
            sc.kernel.validate();
        }
        if (j.contains("solver")) solver_from_json(j.at("solver"), sc.solver);
        sc.checks = j.value("checks", sc.checks);
        sc.output_dir = j.value("output_dir", sc.output_dir);
        sc.seed = j.value("seed", sc.seed);
        sc.threads = j.value("threads", sc.threads);
        sc.solver.seed = sc.seed;

        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            sc.tol_mass = t.value("mass", sc.tol_mass);
            sc.tol_modulus = t.value("modulus", sc.tol_modulus);
            sc.tol_hermitian = t.value("hermitian", sc.tol_hermitian);
            sc.tol_momentum_drift = t.value("momentum_drift", sc.tol_momentum_drift);
            sc.tol_energy_step = t.value("energy_step", sc.tol_energy_step);
            sc.min_energy_drop = t.value("min_energy_drop", sc.min_energy_drop);
            sc.tol_energy_elastic = t.value("energy_elastic", sc.tol_energy_elastic);
            sc.psd_samples = t.value("psd_samples", sc.psd_samples);
            sc.psd_seeds = t.value("psd_seeds", sc.psd_seeds);
            sc.psd_tol = t.value("psd_tol", sc.psd_tol);
        }
        if (j.contains("study")) {
            sc.study_axis = j.at("study").value("axis", sc.study_axis);
            sc.study_levels = j.at("study").value("levels", sc.study_levels);
        }
        if (j.contains("oracle")) {
            const json& o = j.at("oracle");
            sc.oracle_Z = o.value("Z", sc.oracle_Z);
            sc.oracle_xi = o.value("xi_count", sc.oracle_xi);
            sc.oracle_xi_scale = o.value("xi_scale", sc.oracle_xi_scale);
            sc.oracle_dt = o.value("dt", sc.oracle_dt);
            sc.oracle_gain_tol = o.value("gain_tol", sc.oracle_gain_tol);
            sc.oracle_cross_tol = o.value("cross_tol", sc.oracle_cross_tol);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config error: ") + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config error: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return scenario_from_json_text(text);
}

ScenarioOutcome run_scenario(const Scenario& sc) {
    apply_threads(sc.threads);
    std::filesystem::create_directories(sc.output_dir);
    const RestitutionParams rp(sc.e);

    Solver solver(sc.datum, rp, sc.kernel, sc.solver);
    const RunResult run = solver.solve();
    const MomentTrace trace = trace_moments(run);

    dump_grid(run.initial, sc.output_dir + "/initial.ckgrid");
    dump_grid(run.terminal, sc.output_dir + "/terminal.ckgrid");
    write_radial_slices_csv(run.terminal, sc.output_dir + "/terminal_radial.csv");
    write_moments_csv(trace, sc.output_dir + "/moments.csv");
    write_convergence_jsonl(run, sc.output_dir + "/convergence.jsonl");

    ScenarioOutcome out;
    std::vector<std::string> checks = sc.checks;
    if (checks.empty()) checks = {"invariants", "moments", "dissipation", "psd"};

    const double E0 = trace.energy.empty() ? 0.0 : trace.energy.front();
    for (const std::string& name : checks) {
        if (name == "invariants") {
            double max_mass = trace.max_mass_defect;
            double max_mod = 0.0;
            for (const IntervalResult& iv : run.intervals)
                for (double v : iv.max_abs) max_mod = std::max(max_mod, v);
            out.checks.push_back({"mass |phi(t,0)-1|", max_mass, sc.tol_mass,
                                  max_mass < sc.tol_mass, ""});
            out.checks.push_back({"modulus max|phi|-1", max_mod - 1.0, sc.tol_modulus,
                                  max_mod <= 1.0 + sc.tol_modulus, ""});
            const double herm = solver.hermitian_defect();
            out.checks.push_back({"hermitian symmetry", herm, sc.tol_hermitian,
                                  herm < sc.tol_hermitian, ""});
        } else if (name == "moments") {
            out.checks.push_back({"momentum drift", trace.max_momentum_drift,
                                  sc.tol_momentum_drift,
                                  trace.max_momentum_drift < sc.tol_momentum_drift, ""});
            const double scale = std::max(std::fabs(E0), 1.0);
            out.checks.push_back({"energy per-step monotone", trace.max_energy_increase,
                                  sc.tol_energy_step * scale,
                                  trace.max_energy_increase <= sc.tol_energy_step * scale,
                                  ""});
        } else if (name == "dissipation") {
            if (!trace.energy_finite.front()) {
                out.checks.push_back({"dissipation (infinite energy)", 0.0, 0.0, true,
                                      "energy flagged non-finite at t=0"});
            } else if (sc.e < 1.0) {
                const double drop = trace.total_energy_drop;
                out.checks.push_back({"energy drop fraction", drop / E0, sc.min_energy_drop,
                                      drop > sc.min_energy_drop * E0, ""});
            } else {
                const double rel = std::fabs(trace.total_energy_drop) / E0;
                out.checks.push_back({"elastic energy conservation", rel,
                                      sc.tol_energy_elastic, rel < sc.tol_energy_elastic, ""});
            }
        } else if (name == "psd") {
            const CharGrid terminal = run.terminal;
            const CharEval eval = [&terminal](const Vec3& xi) { return terminal.interp(xi); };
            double min_eig = 0.0;
            bool pass = true;
            for (int seed = 0; seed < sc.psd_seeds; ++seed) {
                const PsdVerdict v = check_positive_definite(
                    eval, sc.psd_samples, sc.seed + seed, 0.5 * terminal.R(), sc.psd_tol);
                min_eig = std::min(min_eig, v.min_eigenvalue);
                pass = pass && v.psd;
            }
            out.checks.push_back({"terminal grid PSD (min eigenvalue)", min_eig,
                                  -sc.psd_tol * sc.psd_samples, pass, ""});
        } else {
            throw std::invalid_argument("unknown check suite '" + name + "'");
        }
    }

    json extra;
    extra["A"] = run.A;
    extra["mass_b"] = run.mass_b;
    extra["A_eff"] = run.A_eff;
    extra["C_hat"] = run.C_hat;
    extra["T_interval"] = run.T_interval;
    extra["intervals"] = run.intervals.size();
    extra["completed"] = run.completed;
    if (!run.completed) extra["failure"] = run.failure;
    out.summary_path = sc.output_dir + "/summary.json";
    write_summary(out.summary_path, out.checks, extra);

    out.exit_code = run.completed ? exit_code_from(out.checks) : 3;
    return out;
}

ScenarioOutcome run_study(const Scenario& sc) {
    apply_threads(sc.threads);
    std::filesystem::create_directories(sc.output_dir);
    const RestitutionParams rp(sc.e);
    ScenarioOutcome out;

    std::ofstream csv(sc.output_dir + "/study_" + sc.study_axis + ".csv");
    csv << "level,sup_diff_prev,mass_defect,momentum_drift,energy_final,intervals,converged\n";
    char buf[256];

    if (sc.study_levels.empty()) throw std::invalid_argument("study: empty level list");

    if (sc.study_axis == "cutoff-n") {
        std::vector<int> levels;
        for (double l : sc.study_levels) levels.push_back(int(l));
        const CutoffSequenceResult seq =
            noncutoff_sequence(sc.datum, rp, sc.kernel, sc.solver, levels);
        for (std::size_t i = 0; i < seq.levels.size(); ++i) {
            const MomentTrace tr = trace_moments(seq.runs[i]);
            const double diff = i == 0 ? 0.0 : seq.sup_differences[i - 1];
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%zu,%d\n",
                          seq.levels[i], diff, tr.max_mass_defect, tr.max_momentum_drift,
                          tr.energy.empty() ? 0.0 : tr.energy.back(),
                          seq.runs[i].intervals.size(), seq.runs[i].completed ? 1 : 0);
            csv << buf;
            if (!seq.runs[i].completed) out.exit_code = 3;
        }
        if (seq.sup_differences.size() >= 2) {
            const double first = seq.sup_differences.front();
            const double last = seq.sup_differences.back();
            out.checks.push_back({"cutoff-sequence difference shrink factor",
                                  last > 0 ? first / last : 1e300, 1.5, first >= 1.5 * last,
                                  ""});
        }
    } else {
        CharGrid prev(1.0, 3);
        bool have_prev = false;
        for (double level : sc.study_levels) {
            SolverConfig cfg = sc.solver;
            if (sc.study_axis == "grid-M")
                cfg.grid_M = int(level) | 1;
            else if (sc.study_axis == "sphere-order") {
                cfg.sphere_polar = int(level);
                cfg.sphere_azimuth = std::max(4, (int(level) / 2) & ~1);
            } else if (sc.study_axis == "zeta-nodes") {
                cfg.zeta_radial = int(level);
                cfg.zeta_polar = std::max(4, int(level * 0.75));
                cfg.zeta_azimuth = std::max(4, (int(level) / 2) & ~1);
            } else if (sc.study_axis == "time-m")
                cfg.time_nodes = int(level);
            else
                throw std::invalid_argument("study: unknown axis '" + sc.study_axis + "'");

            Solver solver(sc.datum, rp, sc.kernel, cfg);
            const RunResult run = solver.solve();
            const MomentTrace tr = trace_moments(run);
            const CharGrid terminal = solver.export_state(cfg.export_R, cfg.export_M);
            double diff = 0.0;
            if (have_prev)
                for (std::size_t k = 0; k < terminal.size(); ++k)
                    diff = std::max(diff, std::abs(terminal.data()[k] - prev.data()[k]));
            std::snprintf(buf, sizeof(buf), "%g,%.17g,%.17g,%.17g,%.17g,%zu,%d\n", level, diff,
                          tr.max_mass_defect, tr.max_momentum_drift,
                          tr.energy.empty() ? 0.0 : tr.energy.back(), run.intervals.size(),
                          run.completed ? 1 : 0);
            csv << buf;
            prev = terminal;
            have_prev = true;
            if (!run.completed) out.exit_code = 3;
        }
    }

    write_summary(sc.output_dir + "/study_summary.json", out.checks, json::object());
    if (out.exit_code == 0) out.exit_code = exit_code_from(out.checks);
    return out;
}

ScenarioOutcome run_oracle_suite(const Scenario& sc) {
    apply_threads(sc.threads);
    if (sc.datum.kind != Datum::Kind::Discrete)
        throw std::invalid_argument("oracle suite requires a discrete datum");
    std::filesystem::create_directories(sc.output_dir);
    const RestitutionParams rp(sc.e);

    const AngularKernel bn = cutoff_angular(make_angular(sc.kernel), sc.kernel.n);
    const AngularRule rule =
        make_angular_rule(bn, sc.solver.sphere_polar, sc.solver.normalize_angular);
    const KineticCutoff kc(sc.kernel.gamma, sc.kernel.r, 40.0, 0.05);

    ScenarioOutcome out;
    std::mt19937_64 rng(sc.seed);

    double worst_gain = 0.0;
    json gain_rows = json::array();
    for (int it = 0; it < sc.oracle_xi; ++it) {
        const Vec3 xi = sc.oracle_xi_scale * random_unit(rng) *
                        std::uniform_real_distribution<double>(0.2, 1.0)(rng);
        const GainCheckResult g = gain_term_fourier_check(
            sc.datum.F, xi, rule, sc.solver.sphere_azimuth, kc, sc.oracle_Z, rp);
        worst_gain = std::max(worst_gain, g.rel_gap);
        json row;
        row["xi"] = {xi.x, xi.y, xi.z};
        row["lhs"] = {g.lhs.real(), g.lhs.imag()};
        row["rhs"] = {g.rhs.real(), g.rhs.imag()};
        row["rel_gap"] = g.rel_gap;
        gain_rows.push_back(row);
    }
    out.checks.push_back({"gain-term transform identity (worst gap)", worst_gain,
                          sc.oracle_gain_tol, worst_gain < sc.oracle_gain_tol, ""});

    const TimeDerivativeCheck energy_chk = crosscheck_time_derivative(
        sc.datum.F, tf_energy(), rp, sc.kernel, sc.solver, sc.oracle_dt);
    out.checks.push_back({"weak-form energy slope gap", energy_chk.rel_gap, sc.oracle_cross_tol,
                          energy_chk.rel_gap < sc.oracle_cross_tol, ""});

    json cross_rows = json::array();
    for (int jx = 0; jx < 3; ++jx) {
        const TimeDerivativeCheck c = crosscheck_time_derivative(
            sc.datum.F, tf_coordinate(jx), rp, sc.kernel, sc.solver, sc.oracle_dt);
        json row;
        row["psi"] = "v_" + std::to_string(jx);
        row["weak"] = c.weak_value;
        row["slope"] = c.solver_slope;
        row["abs_gap"] = c.abs_gap;
        cross_rows.push_back(row);
        out.checks.push_back({"weak-form momentum slope |v_" + std::to_string(jx) + "|",
                              c.abs_gap, sc.tol_momentum_drift,
                              c.abs_gap < sc.tol_momentum_drift, ""});
    }

    json extra;
    extra["inputs_hash"] = std::hash<std::string>{}(json(sc.checks).dump() +
                                                    std::to_string(sc.seed));
    extra["gain_checks"] = gain_rows;
    extra["momentum_checks"] = cross_rows;
    extra["energy_check"] = {{"weak", energy_chk.weak_value},
                             {"slope", energy_chk.solver_slope},
                             {"rel_gap", energy_chk.rel_gap}};
    out.summary_path = sc.output_dir + "/oracle_report.json";
    write_summary(out.summary_path, out.checks, extra);
    out.exit_code = exit_code_from(out.checks);
    return out;
}

std::vector<CheckResult> kinematics_battery(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> edist(0.05, 1.0);

    double worst_momentum = 0.0, worst_energy_gain = 0.0, worst_elastic = 0.0;
    double worst_xi_sum = 0.0, worst_xi_norm = 0.0;
    int bound_violations = 0;
    for (int it = 0; it < 10000; ++it) {
        const RestitutionParams rp(edist(rng));
        const VelocityPair pair{random_vec(rng, 3.0), random_vec(rng, 3.0)};
        const SphereDirection sigma(random_unit(rng));
        const SphereDirection omega(random_unit(rng));

        const auto post = post_collision(pair, sigma, rp);
        const auto wpost = omega_post_collision(pair, omega, rp);
        const Vec3 ptot = pair.v + pair.v_star;
        const double pscale = std::max(1.0, ptot.norm());
        worst_momentum = std::max(worst_momentum,
                                  (post.v + post.v_star - ptot).norm() / pscale);
        worst_momentum = std::max(worst_momentum,
                                  (wpost.v + wpost.v_star - ptot).norm() / pscale);

        const double escale = std::max(1.0, pair.v.norm2() + pair.v_star.norm2());
        const double delta =
            (wpost.v.norm2() + wpost.v_star.norm2() - pair.v.norm2() - pair.v_star.norm2()) /
            escale;
        worst_energy_gain = std::max(worst_energy_gain, delta);

        const RestitutionParams elastic(1.0);
        const auto epost = omega_post_collision(pair, omega, elastic);
        worst_elastic = std::max(
            worst_elastic,
            std::fabs(epost.v.norm2() + epost.v_star.norm2() - pair.v.norm2() -
                      pair.v_star.norm2()) /
                escale);

        const Vec3 xi = random_vec(rng, 5.0);
        Vec3 sg = random_unit(rng);
        if (xi.dot(sg) < 0.0) sg = -sg;  // symmetrized hemisphere
        const auto [xp, xm] = xi_split(xi, sg, rp);
        const double xscale = std::max(1.0, xi.norm());
        worst_xi_sum = std::max(worst_xi_sum, (xp + xm - xi).norm() / xscale);
        const double lhs = xp.norm2() + xm.norm2();
        const double rhs = 0.5 * (1.0 + rp.a_plus * rp.a_plus + rp.a_minus * rp.a_minus) *
                               xi.norm2() +
                           rp.a_plus * rp.a_minus * xi.norm() * xi.dot(sg);
        worst_xi_norm =
            std::max(worst_xi_norm, std::fabs(lhs - rhs) / std::max(1.0, xi.norm2()));

        if (xi.norm() > 1e-6) {
            const double cosw = xi.dot(sg) / xi.norm();
            for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
                const double xa = std::pow(xi.norm(), alpha);
                const double base = std::pow(1.0 + cosw, 0.5 * alpha) * xa;
                const double lower =
                    std::pow(0.5 * rp.a_plus * (1.0 + rp.a_minus), 0.5 * alpha) * base;
                const double upper = std::pow(0.25 * (1.0 + rp.a_minus) * (1.0 + rp.a_minus) +
                                                  0.25 * rp.a_plus * rp.a_plus,
                                              0.5 * alpha) *
                                     base;
                const double plus_a = std::pow(xp.norm(), alpha);
                const double tol = 1e-10 * std::max(1.0, upper);
                if (plus_a < lower - tol || plus_a > upper + tol) ++bound_violations;
                const double minus_exact = std::pow(0.5 * rp.a_plus * rp.a_plus, 0.5 * alpha) *
                                           std::pow(1.0 - cosw, 0.5 * alpha) * xa;
                if (std::fabs(std::pow(xm.norm(), alpha) - minus_exact) >
                    1e-10 * std::max(1.0, xa))
                    ++bound_violations;
            }
        }
    }

    std::vector<CheckResult> out;
    out.push_back({"momentum conservation (rel)", worst_momentum, 1e-12,
                   worst_momentum < 1e-12, "10^4 samples, sigma and omega forms"});
    out.push_back({"omega-form energy delta <= 0", worst_energy_gain, 1e-12,
                   worst_energy_gain <= 1e-12, ""});
    out.push_back({"elastic energy delta", worst_elastic, 1e-12, worst_elastic <= 1e-12, ""});
    out.push_back({"xi-sum identity (rel)", worst_xi_sum, 1e-12, worst_xi_sum < 1e-12, ""});
    out.push_back({"xi-norm identity (rel)", worst_xi_norm, 1e-12, worst_xi_norm < 1e-12, ""});
    out.push_back({"xi bound inequalities violations", double(bound_violations), 0.0,
                   bound_violations == 0, ""});
    return out;
}

std::vector<CheckResult> weights_battery(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> edist(0.05, 1.0);
    std::uniform_real_distribution<double> ddist(0.01, 1.0);
    std::uniform_real_distribution<double> adist(0.2, 2.0);

    int subadd_violations = 0;
    for (int it = 0; it < 100000; ++it) {
        const RestitutionParams rp(edist(rng));
        const VelocityPair pair{random_vec(rng, 4.0), random_vec(rng, 4.0)};
        const auto post = post_collision(pair, SphereDirection(random_unit(rng)), rp);
        const double delta = ddist(rng);
        const double alpha0 = adist(rng);
        const double lhs = weight_W_delta(post.v, delta, alpha0);
        const double rhs =
            weight_W_delta(pair.v, delta, alpha0) + weight_W_delta(pair.v_star, delta, alpha0);
        if (lhs > rhs * (1.0 + 1e-12)) ++subadd_violations;
    }

    // Convexity and envelope of W_{delta,kappa,n} on log-spaced x in [0, 1e6].
    const std::vector<double> deltas = {1e-3, 1e-2, 1e-1};
    const std::vector<std::pair<double, int>> shapes = {{1.0, 1}, {1.0, 2}, {0.5, 3}};
    double worst_convexity = 0.0;  // most negative scaled second difference
    double worst_envelope = 0.0;   // max ratio to the fitted envelope
    for (const auto& [kappa, n] : shapes) {
        // Fit the envelope constant on a coarse calibration mesh.
        double C = 0.0;
        for (double delta : deltas)
            for (double lx = -2.0; lx <= 6.0; lx += 0.5) {
                const double x = std::pow(10.0, lx);
                const double d2 = weight_W_kappa_second_difference(x, delta, kappa, n);
                C = std::max(C, d2 / std::pow(1.0 + x, 0.5 * n * kappa - 1.0));
            }
        C *= 1.25;
        for (double delta : deltas) {
            for (double lx = -2.25; lx <= 6.0; lx += 0.125) {
                const double x = std::pow(10.0, lx);
                const double scale = std::pow(1.0 + x, 0.5 * n * kappa - 1.0);
                const double d2 = weight_W_kappa_second_difference(x, delta, kappa, n);
                worst_convexity = std::min(worst_convexity, d2 / scale);
                worst_envelope = std::max(worst_envelope, d2 / (C * scale));
            }
            const double d2_zero = weight_W_kappa_second_difference(0.0, delta, kappa, n);
            worst_convexity = std::min(worst_convexity, d2_zero);
        }
    }

    std::vector<CheckResult> out;
    out.push_back({"W_delta collision subadditivity violations", double(subadd_violations),
                   0.0, subadd_violations == 0, "10^5 samples, constant 1"});
    out.push_back({"W_kappa convexity (scaled min 2nd diff)", worst_convexity, -1e-8,
                   worst_convexity >= -1e-8, ""});
    out.push_back({"W_kappa envelope ratio", worst_envelope, 1.0, worst_envelope <= 1.0,
                   "fitted (1+x)^{n kappa/2 - 1} bound, uniform over delta"});
    return out;
}

std::vector<CheckResult> kernel_transform_battery(const KernelConfig& kernel) {
    const KineticCutoff kc(kernel.gamma, kernel.r, 80.0, 0.05);

    double worst_roundtrip = 0.0;
    for (double q : {0.6, 1.0, 1.4, 1.9, 3.0}) {
        auto integrand = [&](double rho) {
            const double x = q * rho;
            const double s = x < 1e-8 ? 1.0 : std::sin(x) / x;
            return rho * rho * kc.hat(rho) * s;
        };
        const int panels = std::max(16, int(kc.table_zmax() * q / 3.14159265) + 4);
        const double recon =
            4.0 * 3.14159265358979324 * gl_composite(integrand, 0.0, kc.table_zmax(), panels, 12);
        worst_roundtrip =
            std::max(worst_roundtrip, std::fabs(recon - kc.eval(q)) / std::fabs(kc.eval(q)));
    }

    // <zeta>^{-2N} envelope with N from the config, fitted over [1, 100] on a
    // coarse mesh and verified at interleaved points.
    const double expN = double(kernel.N);
    double C = 0.0;
    for (double z = 1.0; z <= 100.0; z += 0.25)
        C = std::max(C, std::fabs(kc.hat_direct(z)) * std::pow(1.0 + z * z, expN));
    C *= 1.3;
    double worst_decay = 0.0;
    for (double z = 1.125; z <= 100.0; z += 0.25)
        worst_decay = std::max(worst_decay, std::fabs(kc.hat_direct(z)) *
                                                std::pow(1.0 + z * z, expN) / C);

    std::vector<CheckResult> out;
    out.push_back({"transform round trip (worst rel)", worst_roundtrip, 0.01,
                   worst_roundtrip < 0.01, "5 radii"});
    out.push_back({"transform decay envelope ratio", worst_decay, 1.0, worst_decay <= 1.0,
                   "fitted <zeta>^-4 bound on [1, 100]"});
    return out;
}

std::vector<CheckResult> pd_battery(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);

    double min_residual = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const DiscreteMeasure F = random_discrete_measure(rng, 5, 1.5);
        const CharEval phi = make_discrete_eval(F);
        const double alpha = 1.5;
        // Norm estimate over a dense sample plus the probe points themselves.
        for (int it = 0; it < 100; ++it) {
            const Vec3 a{u(rng), u(rng), u(rng)};
            const Vec3 b{u(rng), u(rng), u(rng)};
            double norm_est = 0.0;
            auto ratio = [&](const Vec3& xi) {
                const double nn = xi.norm();
                return nn < 1e-12 ? 0.0 : std::abs(phi(xi) - 1.0) / std::pow(nn, alpha);
            };
            for (int s = 0; s < 512; ++s) {
                const double scale = std::pow(10.0, -2.0 + 4.0 * (s / 512.0));
                norm_est = std::max(norm_est, ratio(scale * random_unit(rng)));
            }
            for (const Vec3& p : {a, b, a + b, a - b}) norm_est = std::max(norm_est, ratio(p));
            const PdResiduals r = pd_inequality_residuals(phi, a, b, alpha, norm_est);
            min_residual = std::min({min_residual, r.r1, r.r2, r.r3});
        }
    }

    bool psd_all = true;
    double min_eig = 0.0;
    for (int s = 0; s < 20; ++s) {
        const DiscreteMeasure F = random_discrete_measure(rng, 4, 2.0);
        const PsdVerdict v = check_positive_definite(make_discrete_eval(F), 16, seed + s, 4.0);
        psd_all = psd_all && v.psd;
        min_eig = std::min(min_eig, v.min_eigenvalue);
    }

    std::vector<CheckResult> out;
    out.push_back({"pd-inequality min residual", min_residual, -1e-10,
                   min_residual >= -1e-10, "10^3 triples"});
    out.push_back({"measure PSD min eigenvalue", min_eig, -1e-8 * 16, psd_all, "20 seeds"});
    return out;
}

ScenarioOutcome run_quick_suites(const Scenario& sc) {
    apply_threads(sc.threads);
    std::filesystem::create_directories(sc.output_dir);
    ScenarioOutcome out;
    std::vector<std::string> suites = sc.checks;
    if (suites.empty()) suites = {"kinematics", "weights", "kernel-transform", "pd"};
    for (const std::string& s : suites) {
        std::vector<CheckResult> batch;
        if (s == "kinematics") batch = kinematics_battery(sc.seed);
        else if (s == "weights") batch = weights_battery(sc.seed);
        else if (s == "kernel-transform") batch = kernel_transform_battery(sc.kernel);
        else if (s == "pd") batch = pd_battery(sc.seed);
        else throw std::invalid_argument("unknown suite '" + s + "'");
        out.checks.insert(out.checks.end(), batch.begin(), batch.end());
    }
    out.summary_path = sc.output_dir + "/suite_summary.json";
    write_summary(out.summary_path, out.checks, json::object());
    out.exit_code = exit_code_from(out.checks);
    return out;
}

}  // namespace charkin
