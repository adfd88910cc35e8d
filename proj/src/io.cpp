#include "charkin/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace charkin {

namespace {
constexpr char kMagic[8] = {'C', 'K', 'G', 'R', 'I', 'D', '0', '1'};
constexpr std::uint32_t kEndianTag = 0x01020304u;
constexpr std::uint32_t kVersion = 1u;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void dump_grid(const CharGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_grid: cannot open " + path);
    os.write(kMagic, sizeof(kMagic));
    put(os, kEndianTag);
    put(os, kVersion);
    put(os, grid.R());
    put(os, std::int32_t(grid.M()));
    std::vector<float> payload;
    payload.reserve(2 * grid.size());
    for (const Complex& c : grid.data()) {
        payload.push_back(float(c.real()));
        payload.push_back(float(c.imag()));
    }
    os.write(reinterpret_cast<const char*>(payload.data()),
             std::streamsize(payload.size() * sizeof(float)));
    if (!os) throw std::runtime_error("dump_grid: write failed for " + path);
}

CharGrid load_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_grid: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("load_grid: bad magic in " + path);
    std::uint32_t endian = 0, version = 0;
    get(is, endian);
    get(is, version);
    if (endian != kEndianTag) throw std::runtime_error("load_grid: foreign endianness");
    if (version != kVersion) throw std::runtime_error("load_grid: unsupported version");
    double R = 0.0;
    std::int32_t M = 0;
    get(is, R);
    get(is, M);
    CharGrid grid(R, M);
    std::vector<float> payload(2 * grid.size());
    is.read(reinterpret_cast<char*>(payload.data()),
            std::streamsize(payload.size() * sizeof(float)));
    if (!is) throw std::runtime_error("load_grid: truncated payload in " + path);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid.data()[i] = Complex{payload[2 * i], payload[2 * i + 1]};
    return grid;
}

void write_radial_slices_csv(const CharGrid& grid, const std::string& path, int bins) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_radial_slices_csv: cannot open " + path);
    const double rmax = grid.R() * std::sqrt(3.0);
    std::vector<double> sum_re(bins, 0.0), sum_im(bins, 0.0), amin(bins, 1e300),
        amax(bins, 0.0);
    std::vector<int> count(bins, 0);
    const int M = grid.M();
    for (int ix = 0; ix < M; ++ix)
        for (int iy = 0; iy < M; ++iy)
            for (int iz = 0; iz < M; ++iz) {
                const double r = grid.node(ix, iy, iz).norm();
                int b = std::min(int(r / rmax * bins), bins - 1);
                const Complex c = grid.at(ix, iy, iz);
                sum_re[b] += c.real();
                sum_im[b] += c.imag();
                amin[b] = std::min(amin[b], std::abs(c));
                amax[b] = std::max(amax[b], std::abs(c));
                ++count[b];
            }
    os << "r,mean_re,mean_im,min_abs,max_abs,count\n";
    char line[256];
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      (b + 0.5) * rmax / bins, sum_re[b] / count[b], sum_im[b] / count[b],
                      amin[b], amax[b], count[b]);
        os << line;
    }
}

void write_moments_csv(const MomentTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_moments_csv: cannot open " + path);
    os << "t,mass,px,py,pz,energy,energy_finite";
    for (double order : trace.fractional_orders) os << ",m_" << order;
    os << "\n";
    char buf[512];
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d",
                      trace.times[k], trace.mass[k], trace.momentum[k].x, trace.momentum[k].y,
                      trace.momentum[k].z, trace.energy[k], trace.energy_finite[k] ? 1 : 0);
        os << buf;
        // Fractional columns exist at interval-end times only.
        for (std::size_t q = 0; q < trace.fractional_orders.size(); ++q) {
            bool found = false;
            for (std::size_t j = 0; j < trace.fractional_times.size(); ++j)
                if (trace.fractional_times[j] == trace.times[k]) {
                    std::snprintf(buf, sizeof(buf), ",%.17g", trace.fractional_values[q][j]);
                    os << buf;
                    found = true;
                    break;
                }
            if (!found) os << ",";
        }
        os << "\n";
    }
}

void write_convergence_jsonl(const RunResult& run, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_convergence_jsonl: cannot open " + path);
    char buf[256];
    for (std::size_t k = 0; k < run.intervals.size(); ++k)
        for (const PicardLog& log : run.intervals[k].history) {
            std::snprintf(buf, sizeof(buf),
                          "{\"interval\":%zu,\"iteration\":%d,\"residual\":%.17g,"
                          "\"wall_ms\":%.3f}\n",
                          k, log.iteration, log.residual, log.wall_ms);
            os << buf;
        }
}

}  // namespace charkin
