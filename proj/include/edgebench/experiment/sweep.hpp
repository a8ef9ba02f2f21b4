#pragma once

#include <edgebench/core/config.hpp>
#include <edgebench/metrics/summary.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace edgebench::experiment {

/// Arrival-rate sweep: every (policy, multiplier, seed) combination of the
/// base scenario, with arrival rates scaled by the multiplier.
struct SweepSpec {
    ScenarioConfig base;
    std::vector<double> lambda_multipliers;
    std::vector<PolicySpec> policies;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir = ".";
};

/// `dir` anchors relative paths (base_scenario, output_dir). Throws
/// MalformedConfig on empty lists or non-positive multipliers.
SweepSpec sweep_from_json(const nlohmann::json& j, const std::filesystem::path& dir);
SweepSpec load_sweep(const std::filesystem::path& path);

/// The scenario of one sweep cell.
ScenarioConfig cell_scenario(const SweepSpec& spec, const PolicySpec& policy, double multiplier,
                             std::uint64_t seed);

struct CellResult {
    metrics::RunLabel label;
    std::optional<metrics::RunSummary> summary;
    std::string error;  // empty on success
};

/// Cells in (policy, multiplier, seed) order, whatever order they ran in.
/// MDP policies are solved once per distinct model and shared across
/// seeds. A failing cell records its error and the sweep carries on.
std::vector<CellResult> run_sweep(const SweepSpec& spec, int threads);

/// EDGEBENCH_THREADS when set to a positive integer, otherwise the hardware
/// concurrency.
int worker_count();

/// Summary columns plus a trailing `error` column.
std::string sweep_csv(std::span<const CellResult> cells);

/// Comparison table over successful cells.
std::string comparison_csv(std::span<const CellResult> cells);

} // namespace edgebench::experiment
