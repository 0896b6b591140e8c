#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cfm/analytics.hpp"
#include "cfm/circulation_matrix.hpp"
#include "cfm/simulation.hpp"

namespace cfm::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest decimal that parses back to the same double.
std::string format_shortest(double v);
/// format_shortest, with ".0" appended to integral values ("1" -> "1.0").
std::string format_fraction(double v);

/// Strict full-string decimal parse. Throws ParseError (with `line`) on junk.
double parse_double(std::string_view text, std::size_t line = 0);

// Matrix triplet format:
//
//   # optional comment lines (fingerprint)
//   cfm <n> <nnz>
//   <i> <j> <f_ij>        one line per stored entry, 1-based, any order
//
// Loading validates; a matrix that is not column-stochastic is rejected with
// a ValidationError naming the offending column.

void write_matrix(std::ostream& out, const CirculationMatrix& m, const std::string& fingerprint = {});
void save_matrix(const std::filesystem::path& path, const CirculationMatrix& m, const std::string& fingerprint = {});

/// Parses without validating (structure errors still throw ParseError).
CirculationMatrix parse_matrix(std::istream& in);
/// Parses and validates.
CirculationMatrix read_matrix(std::istream& in);
CirculationMatrix load_matrix(const std::filesystem::path& path);

/// Whitespace- or comma-separated amounts, '#' comments allowed.
std::vector<double> read_amounts(std::istream& in);
std::vector<double> load_amounts(const std::filesystem::path& path);

// Snapshot CSV: "tau,total,x_1,...,x_n" (full) or "tau,total,gini,top1,top10"
// (summary). A summary-policy run writes its full final vector separately.

void write_snapshots(std::ostream& out, const SimulationTrace& trace, bool summary_rows,
                     const std::string& fingerprint = {});
/// "tau,total,x_1,...,x_n" rows for full snapshots only.
void write_full_snapshots(std::ostream& out, const SimulationTrace& trace, const std::string& fingerprint = {},
                          bool final_only = false);
/// "tau,total,abs_drift,rel_drift", one row per step.
void write_drift(std::ostream& out, const SimulationTrace& trace, const std::string& fingerprint = {});

struct SnapshotTable {
    bool full = false;
    std::size_t n = 0;  // agents, for full tables
    std::vector<Snapshot> rows;
};

SnapshotTable read_snapshots(std::istream& in);
SnapshotTable load_snapshots(const std::filesystem::path& path);

/// "key=value" lines.
void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv,
                      const std::string& fingerprint = {});
std::map<std::string, std::string> read_key_values(std::istream& in);

void write_lorenz(std::ostream& out, const std::vector<analytics::LorenzPoint>& pts, const std::string& fingerprint = {});
void write_ccdf(std::ostream& out, const std::vector<analytics::CcdfPoint>& pts, const std::string& fingerprint = {});
void write_convergence(std::ostream& out, const analytics::ConvergenceReport& r, const std::string& fingerprint = {});

}  // namespace cfm::io
