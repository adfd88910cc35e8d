#pragma once

#include <string>

#include "charkin/charfn.hpp"
#include "charkin/moment_traces.hpp"
#include "charkin/solver.hpp"

namespace charkin {

/// Binary grid dump: 8-byte magic "CKGRID01", u32 endianness tag 0x01020304,
/// u32 version, f64 R, i32 M, then M^3 complex64 samples (float32 re/im pairs)
/// row major with the z index fastest.
void dump_grid(const CharGrid& grid, const std::string& path);
CharGrid load_grid(const std::string& path);

/// Radial profile of a grid as CSV: bin center, mean Re, mean Im, min |phi|,
/// max |phi|, node count.
void write_radial_slices_csv(const CharGrid& grid, const std::string& path, int bins = 48);

/// Moment trace as CSV: t, mass, px, py, pz, energy, energy_finite, then one
/// m_alpha column per tracked fractional order (interval ends only).
void write_moments_csv(const MomentTrace& trace, const std::string& path);

/// Per-interval Picard convergence as JSON lines.
void write_convergence_jsonl(const RunResult& run, const std::string& path);

}  // namespace charkin
