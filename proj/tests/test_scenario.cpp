#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "charkin/io.hpp"
#include "charkin/scenario.hpp"

using namespace charkin;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(bool(is));
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

const char* kSmallConfig = R"json({
  "seed": 7,
  "output_dir": "run_out",
  "datum": {"type": "discrete", "weights": [1.0], "velocities": [[0, 0, 0]]},
  "restitution": {"e": 0.8},
  "kernel": {"gamma": -1.0, "s": 0.25, "K": 1.0, "n": 8, "r": 2.0},
  "solver": {
    "T_final": 0.05, "R_eval": 1.2, "grid_M": 43,
    "sphere_polar": 8, "sphere_azimuth": 6,
    "zeta_radial": 10, "zeta_polar": 8, "zeta_azimuth": 6,
    "backend": "serial", "export_R": 1.0, "export_M": 17
  },
  "checks": ["invariants", "moments", "psd"]
})json";

}  // namespace

TEST_CASE("config parsing: defaults, datum kinds, errors") {
    const Scenario sc = scenario_from_json_text(kSmallConfig);
    CHECK(sc.seed == 7);
    CHECK(sc.e == doctest::Approx(0.8));
    CHECK(sc.kernel.n == 8);
    CHECK(sc.solver.grid_M == 43);
    CHECK(sc.datum.kind == Datum::Kind::Discrete);

    CHECK_THROWS_AS(scenario_from_json_text("{ not json"), std::invalid_argument);
    CHECK_THROWS_AS(scenario_from_json_text(R"({"kernel": {"gamma": 1.0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(scenario_from_json_text(R"({"datum": {"type": "warp"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        scenario_from_json_text(
            R"({"datum": {"type": "discrete", "weights": [0.7], "velocities": [[0,0,0]]}})"),
        std::invalid_argument);
    CHECK_THROWS_AS(scenario_from_json_text(R"({"datum": {"type": "levy", "alpha": 2.5}})"),
                    std::invalid_argument);
}

TEST_CASE("grid dump round trip") {
    const CharGrid g = gaussian_char(0.7, 1.5, 17);
    std::filesystem::create_directories("io_out");
    dump_grid(g, "io_out/grid.ckgrid");
    const CharGrid back = load_grid("io_out/grid.ckgrid");
    CHECK(back.M() == g.M());
    CHECK(back.R() == doctest::Approx(g.R()));
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        diff = std::max(diff, std::abs(g.data()[i] - back.data()[i]));
    CHECK(diff < 1e-6);  // complex64 payload

    write_radial_slices_csv(g, "io_out/slices.csv");
    const std::string csv = read_file("io_out/slices.csv");
    CHECK(csv.rfind("r,mean_re,mean_im", 0) == 0);
}

TEST_CASE("run_scenario end to end on the trivial datum") {
    const Scenario sc = scenario_from_json_text(kSmallConfig);
    const ScenarioOutcome out = run_scenario(sc);
    CHECK(out.exit_code == 0);
    REQUIRE(!out.checks.empty());
    for (const CheckResult& c : out.checks) {
        INFO(c.name, " measured=", c.measured, " tol=", c.tolerance);
        REQUIRE(c.pass);
    }
    CHECK(std::filesystem::exists("run_out/moments.csv"));
    CHECK(std::filesystem::exists("run_out/terminal.ckgrid"));
    CHECK(std::filesystem::exists("run_out/convergence.jsonl"));
    CHECK(std::filesystem::exists("run_out/summary.json"));

    // Reproducibility: identical config and seed give bit-identical CSVs.
    const std::string first = read_file("run_out/moments.csv");
    run_scenario(sc);
    CHECK(read_file("run_out/moments.csv") == first);
}

TEST_CASE("quick suites: kinematics and pd batteries are green") {
    for (const CheckResult& c : kinematics_battery(123)) {
        INFO(c.name, " measured=", c.measured);
        REQUIRE(c.pass);
    }
    for (const CheckResult& c : pd_battery(321)) {
        INFO(c.name, " measured=", c.measured);
        REQUIRE(c.pass);
    }
}

TEST_CASE("study on the trivial datum writes a table") {
    Scenario sc = scenario_from_json_text(kSmallConfig);
    sc.output_dir = "study_out";
    sc.study_axis = "time-m";
    sc.study_levels = {4, 8};
    const ScenarioOutcome out = run_study(sc);
    CHECK(out.exit_code == 0);
    CHECK(std::filesystem::exists("study_out/study_time-m.csv"));
}
