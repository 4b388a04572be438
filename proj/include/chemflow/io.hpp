#pragma once

#include <string>
#include <vector>

#include "chemflow/diagnostics.hpp"
#include "chemflow/fields.hpp"

namespace chemflow {

/**
 * @file io.hpp
 * @brief Diagnostics CSV, binary state snapshots and the offline record
 * checker.
 *
 * Records are plain CSV (the human/plotting interface) with the fixed header
 *   t,mass_n,min_n,max_n,sup_c,int_c,grad_c_sq,kinetic,enstrophy_like,
 *   F,G,y_p,z_p,clamp_flags
 * followed by one n_Lp_<p> and one u_Lp_<p> column per configured p, all
 * values at 17 significant digits so doubles round-trip bit-exactly.
 *
 * Snapshots are the machine interface: little-endian binary, magic "CHFL",
 * u32 format version, u32 dim, u32 cell counts, f64 lengths, f64 t, f64 eps,
 * then n, c and each velocity component as f64 arrays in row-major order,
 * and a trailing CRC-32 of everything after the magic/version prefix.
 * The pressure is not serialized; it is a projection by-product recomputed
 * on the next step (read_snapshot returns it zeroed).
 */

void write_records(const std::vector<DiagnosticsRecord>& records,
                   const std::vector<double>& p_norms, const std::string& path);

struct RecordsFile {
    std::vector<DiagnosticsRecord> records;
    std::vector<double> p_norms;
};

RecordsFile read_records(const std::string& path);

void write_snapshot(const SimState& state, const std::string& path);
SimState read_snapshot(const std::string& path);

struct CheckReport {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Re-assert the offline-checkable monotonicity/positivity invariants on a
/// record sequence: strictly increasing t, finite entries, nonincreasing
/// sup_c and int_c, the density floor, post-burn-in G monotonicity and the
/// y <= 1.05 z comparison.
CheckReport check_records(const std::vector<DiagnosticsRecord>& records);

} // namespace chemflow
