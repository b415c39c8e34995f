#ifndef DSIM_DRIVER_HPP
#define DSIM_DRIVER_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsim/barrier.hpp"

namespace dsim {

// Batch driver behind the CLI: strict JSON run configurations, deterministic
// CSV/JSON emission, and the canned claim reproductions.

enum class Experiment { transmission, delays, packet, superosc, fabry, weak, dwell_weak };

std::string experiment_name(Experiment e);

enum class OutputFormat { csv, json };

struct RunConfig {
    Experiment experiment = Experiment::transmission;
    BarrierArray scene;            ///< default scene (m = hbar = 1, no spikes)
    nlohmann::json sweep;          ///< experiment-specific block, validated
    nlohmann::json numerics;       ///< optional overrides, validated
    std::string output_path;
    OutputFormat output_format = OutputFormat::csv;
    nlohmann::json echo;           ///< normalized config for the metadata echo
};

/// Strict parse: unknown keys anywhere are rejected with their path, every
/// numeric field is checked against the module preconditions it feeds.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Tabular result: metadata lines, column names, preformatted cells. Cells
/// are formatted once (scientific, 17 significant digits) so CSV and JSON
/// emission are byte-deterministic.
struct Table {
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);

/// Execute the experiment. Rows of a sweep are computed concurrently
/// (threads = 0 picks the hardware count) and emitted in sweep order;
/// per-row numerical errors land in the status column and do not abort.
Table run_experiment(const RunConfig& cfg, unsigned threads = 0);

void write_csv(const std::string& path, const Table& t);
void write_json(const std::string& path, const Table& t);

/// run_experiment + write to cfg.output_path in cfg.output_format.
void run_to_file(const RunConfig& cfg, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Claim reproductions
// ---------------------------------------------------------------------------

struct ClaimOutcome {
    std::string claim;
    bool pass = false;
    std::vector<std::string> lines;  ///< human-readable check lines
    Table table;                     ///< raw numbers, written as <claim>.csv
};

const std::vector<std::string>& claim_ids();

/// Run the canonical desk-scale configuration for one claim id and check it
/// against its acceptance thresholds. Kernel dispatch is pinned to the
/// scalar backend for the duration so the emitted tables are byte-stable
/// across machines. Unknown ids throw ValidationError.
ClaimOutcome reproduce_claim(const std::string& claim_id);

} // namespace dsim

#endif
