#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "cfm/config.hpp"

namespace cfm::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 1,        // validation or configuration problem
    kRuntimeError = 2,       // I/O and other runtime failures
    kVerificationFailed = 3,
};

struct Console {
    std::ostream& out;
    std::ostream& err;
    bool quiet = false;
};

/// Writes the generated matrices into cfg.output_dir: matrix.cfm for a single
/// matrix, matrix_1.cfm ... matrix_K.cfm for periodic / regime schedules.
int cmd_gen(const config::RunConfig& cfg, Console& console);

/// Runs the simulation and writes snapshots.csv, drift.csv, audit.txt and
/// resolved_config.json (plus final.csv under a summary snapshot policy).
int cmd_run(const config::RunConfig& cfg, Console& console);

struct AnalyzeOptions {
    std::filesystem::path trace;                 // run directory or snapshots.csv
    std::optional<std::filesystem::path> out_dir;  // defaults to the trace directory
    std::optional<std::size_t> hill_k;
    bool convergence = false;                    // require convergence diagnostics
    std::optional<std::filesystem::path> reference;
    double threshold = 1e-8;
};

/// Writes inequality.txt, lorenz.csv, tail_ccdf.csv and, when the trace has
/// at least two full snapshots, convergence.csv.
int cmd_analyze(const AnalyzeOptions& options, Console& console);

struct VerifyOptions {
    double step_tolerance = 1e-12;
    double chain_tolerance = 1e-11;
    double product_tolerance = 1e-10;
};

/// Runs the sparse engine and the dense oracle on the same inputs and writes
/// verify.txt. Exit 0 iff every comparison is within tolerance.
int cmd_verify(const config::RunConfig& cfg, const VerifyOptions& options, Console& console);

}  // namespace cfm::cli
