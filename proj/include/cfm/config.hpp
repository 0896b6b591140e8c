#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfm/generators.hpp"
#include "cfm/simulation.hpp"
#include "cfm/wealth.hpp"

#include "json.hpp"

namespace cfm::config {

struct InitialWealthSpec {
    enum class Kind { Equal, Uniform, PointMass, FromFile };

    Kind kind = Kind::Equal;
    double amount = 100.0;               // Equal, PointMass
    double low = 0.0, high = 200.0;      // Uniform
    std::size_t agent = 0;               // PointMass, 0-based
    std::filesystem::path path;          // FromFile
};

/// Fully resolved run description. Every optional field of the file has
/// been filled with its default.
struct RunConfig {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    NumericMode mode = NumericMode::Float;

    std::optional<gen::TopologySpec> topology;      // generated matrices
    std::vector<std::filesystem::path> matrix_paths; // or matrices loaded from files
    gen::SpendingSpec spending;
    gen::ScheduleSpec schedule;
    std::size_t matrix_count = 1;  // generated matrices for periodic / regime switching
    std::filesystem::path edge_list_path;

    InitialWealthSpec initial_wealth;
    SnapshotPolicy snapshots;
    std::filesystem::path output_dir = "out";
    bool quiet = false;

    /// Resolved configuration as JSON, in the same schema as the input.
    nlohmann::ordered_json to_json() const;
    /// FNV-1a 64 of the resolved model parameters (output settings excluded), hex.
    std::string hash() const;
    /// One-line stamp written at the top of every output file.
    std::string fingerprint() const;
};

/// Parses and validates a JSON run config. Throws ConfigError naming the
/// dotted field path on any schema violation, including unknown fields.
/// Relative paths inside the file resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// Applies CFM_OUT_DIR and CFM_VERBOSITY. Model parameters are never read
/// from the environment.
void apply_environment(RunConfig& cfg);

/// Builds the initial wealth; integer mode requires whole units.
std::vector<double> initial_wealth(const RunConfig& cfg);

/// Matrices the run steps through: loaded from matrix_paths, or generated
/// (matrix r uses seed derived from (seed, r); r = 0 uses the seed itself).
std::vector<Schedule::MatrixPtr> build_matrices(const RunConfig& cfg, gen::GenerationLog* log = nullptr);

Schedule build_schedule(const RunConfig& cfg, const std::vector<Schedule::MatrixPtr>& matrices);

std::uint64_t matrix_seed(std::uint64_t seed, std::size_t index) noexcept;

}  // namespace cfm::config
