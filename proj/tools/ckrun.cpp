// Scenario runner: solves the cutoff equation in the characteristic
// representation and runs the verification suites.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "charkin/scenario.hpp"

namespace {

void print_checks(const charkin::ScenarioOutcome& out) {
    for (const charkin::CheckResult& c : out.checks)
        std::printf("[%s] %-45s measured=%.6g tolerance=%.6g\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.tolerance);
    if (!out.summary_path.empty()) std::printf("report: %s\n", out.summary_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"characteristic-function solver for inelastic kinetic equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "solve and run the requested checks");
    CLI::App* cmd_study = app.add_subcommand("study", "convergence study along one axis");
    CLI::App* cmd_oracle = app.add_subcommand("oracle", "velocity-space oracle cross-checks");
    CLI::App* cmd_suite = app.add_subcommand("suite", "self-contained verification batteries");
    for (CLI::App* cmd : {cmd_run, cmd_study, cmd_oracle, cmd_suite}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    charkin::Scenario sc;
    try {
        sc = charkin::load_scenario(config_path);
        if (!out_dir.empty()) sc.output_dir = out_dir;
        if (seed_set) {
            sc.seed = seed;
            sc.solver.seed = seed;
        }
        if (threads >= 0) sc.threads = threads;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        charkin::ScenarioOutcome out;
        if (cmd_run->parsed()) out = charkin::run_scenario(sc);
        if (cmd_study->parsed()) out = charkin::run_study(sc);
        if (cmd_oracle->parsed()) out = charkin::run_oracle_suite(sc);
        if (cmd_suite->parsed()) out = charkin::run_quick_suites(sc);
        print_checks(out);
        if (out.exit_code == 3) std::fprintf(stderr, "solver did not converge\n");
        return out.exit_code;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
