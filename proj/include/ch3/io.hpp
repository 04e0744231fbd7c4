#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "ch3/diagnostics.hpp"
#include "ch3/dynamics.hpp"
#include "ch3/state.hpp"

namespace ch3 {

// Binary field snapshot: magic "C3F1", n as uint64 LE, L as float64 LE,
// then n float64 LE samples.
void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

// Binary state snapshot: magic "C3S1", n as uint64 LE, L as float64 LE,
// t as float64 LE, then the u, v, w blocks of n float64 LE samples each.
void write_state(const std::filesystem::path& path, const StateTriple& z);
StateTriple read_state(const std::filesystem::path& path);

// CSV exports (17 significant digits, deterministic).
void write_field_csv(const std::filesystem::path& path, const Field& f);
void write_state_csv(const std::filesystem::path& path, const StateTriple& z);

/// Diagnostics CSV: t,E,Q,min_ux,min_vx,min_wx,sup_sq_sum plus one column per
/// requested weighted norm (in the records' map order).
void write_diagnostics_csv(const std::filesystem::path& path,
                           std::span<const DiagnosticsRecord> records);

/// Termination report as a JSON document (reason, t_final, thresholds, and the
/// tail of the slope history).
void write_termination_report(const std::filesystem::path& path,
                              const TerminationReport& report, double E0, double Q0);

std::string format_double(double v);  // shortest round-trip-exact decimal

}  // namespace ch3
