// Times the collision-operator sweeps: serial reference vs OpenMP kernels,
// radial and full-grid engines, and verifies the backends agree bitwise.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "charkin/moment_traces.hpp"
#include "charkin/solver.hpp"

using namespace charkin;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BenchEntry {
    const char* label;
    double serial_s;
    double omp_s;
    bool bitwise_equal;
};

BenchEntry bench_mode(const Datum& datum, const RestitutionParams& rp, const KernelConfig& kc,
                      SolverConfig cfg, const char* label, int reps) {
    cfg.T_final = 0.0;

    cfg.backend = Backend::Serial;
    Solver serial(datum, rp, kc, cfg);
    cfg.backend = Backend::OpenMP;
    Solver omp(datum, rp, kc, cfg);

    // One Picard application exercises exactly one RHS sweep per time node.
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> prof_serial;
    for (int r = 0; r < reps; ++r) prof_serial = serial.picard_residual_profile(0.05);
    const double ts = seconds_since(t0) / reps;

    t0 = std::chrono::steady_clock::now();
    std::vector<double> prof_omp;
    for (int r = 0; r < reps; ++r) prof_omp = omp.picard_residual_profile(0.05);
    const double to = seconds_since(t0) / reps;

    bool equal = prof_serial.size() == prof_omp.size();
    for (std::size_t i = 0; equal && i < prof_serial.size(); ++i)
        equal = std::memcmp(&prof_serial[i], &prof_omp[i], sizeof(double)) == 0;

    return {label, ts, to, equal};
}

}  // namespace

int main() {
    KernelConfig kc;
    kc.gamma = -1.0;
    kc.s = 0.25;
    kc.K = 1.0;
    kc.n = 8;
    kc.r = 2.0;
    const RestitutionParams rp(0.8);

    std::vector<BenchEntry> entries;

    {
        SolverConfig cfg;
        cfg.R_eval = 4.0;
        cfg.Z = 10.0;
        cfg.radial_h = 0.05;
        cfg.sphere_polar = 12;
        cfg.zeta_radial = 16;
        cfg.zeta_polar = 12;
        cfg.zeta_azimuth = 6;
        entries.push_back(bench_mode(Datum::gaussian(1.0), rp, kc, cfg, "radial 80x12x1152", 3));
    }
    {
        DiscreteMeasure F;
        F.w = {0.5, 0.3, 0.2};
        F.v = {{0.6, 0.1, -0.2}, {-0.5, 0.3, 0.1}, {-0.75, -0.7, 0.35}};
        const Vec3 m = F.mean();
        for (Vec3& v : F.v) v -= m;
        SolverConfig cfg;
        cfg.R_eval = 1.2;
        cfg.grid_M = 43;
        cfg.sphere_polar = 12;
        cfg.sphere_azimuth = 8;
        cfg.zeta_radial = 12;
        cfg.zeta_polar = 10;
        cfg.zeta_azimuth = 6;
        entries.push_back(bench_mode(Datum::discrete(F), rp, kc, cfg, "grid3d M=43 R=1.2", 1));
    }

    std::printf("%-22s %12s %12s %9s %s\n", "engine", "serial [s]", "openmp [s]", "speedup",
                "bitwise");
    for (const BenchEntry& e : entries)
        std::printf("%-22s %12.3f %12.3f %8.2fx %s\n", e.label, e.serial_s, e.omp_s,
                    e.serial_s / e.omp_s, e.bitwise_equal ? "equal" : "DIFFERS");
    return 0;
}
