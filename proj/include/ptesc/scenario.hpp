#pragma once

// Scenario execution: single runs, output files and parameter sweeps.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ptesc/analysis.hpp"
#include "ptesc/config.hpp"
#include "ptesc/sim.hpp"

namespace ptesc {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitCompleted = 0,
    kExitUsage = 1,
    kExitDiverged = 2,
};

struct RunResult {
    ScenarioConfig config;
    Trajectory trajectory;
    std::optional<Optimum> optimum;
    /// Why the optimum could not be resolved, when it could not.
    std::string optimum_error;
    /// Present for completed runs with a resolved optimum.
    std::optional<ConvergenceReport> convergence;
    std::optional<EnvelopeCheck> envelope;
    /// Mean |xi - L_g h| over the trailing half, ESC runs only.
    std::optional<double> estimate_error;
    std::vector<std::string> warnings;

    [[nodiscard]] int exit_code() const noexcept {
        return trajectory.completed() ? kExitCompleted : kExitDiverged;
    }
};

/// Simulates the configured mode and evaluates the run against the optimum.
/// Never throws for a diverging simulation; the trajectory carries the status.
RunResult run_scenario(const ScenarioConfig& cfg);

/// report.json contents.
std::string report_json(const RunResult& result);

/// Writes the formats selected in cfg.outputs into `dir` (created when
/// missing) and returns the written paths. Throws Error on IO failure.
std::vector<std::string> write_outputs(const RunResult& result, const std::string& dir);

struct SweepAxis {
    /// Fully qualified field, e.g. params.omega.
    std::string field;
    std::vector<std::string> values;
};

/// Parses `field=v1,v2,...`. Commas inside brackets belong to the value, so
/// `x0=[1,2],[3,4]` has two values. Throws ConfigError.
SweepAxis parse_sweep_axis(const std::string& spec);

struct SweepOptions {
    std::size_t max_cells = 10000;
    /// Concurrent cells; 0 picks the hardware concurrency.
    unsigned workers = 0;
    bool keep_trajectories = false;
    /// When set, every cell writes its outputs into <dir>/cell_NNNNN.
    std::optional<std::string> cell_output_dir;
};

struct SweepCell {
    std::size_t index = 0;
    /// One value per axis, in axis order.
    std::vector<std::string> values;
    std::optional<RunResult> result;
    /// Set when the cell could not run (invalid override, IO failure).
    std::string error;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells;

    [[nodiscard]] bool any_ran() const noexcept;
};

/// Runs the Cartesian product of the axes. Cells are ordered
/// lexicographically by value index with the first axis most significant,
/// independent of scheduling. Throws ConfigError when the product exceeds
/// max_cells or an axis is malformed.
SweepResult sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes,
                  const SweepOptions& options = {});

std::string sweep_summary_csv(const SweepResult& result);

}  // namespace ptesc
