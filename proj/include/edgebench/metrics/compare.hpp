#pragma once

#include <edgebench/metrics/summary.hpp>

#include <span>
#include <string>
#include <vector>

namespace edgebench::metrics {

/// Sample mean with a Student-t 95% confidence half-width.
struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;

    double lower() const noexcept { return mean - half_width; }
    double upper() const noexcept { return mean + half_width; }
};

MeanCi mean_ci95(std::span<const double> samples);

struct ComparisonRow {
    std::string policy;
    double V = 0.0;
    double lambda_multiplier = 1.0;
    std::size_t runs = 0;
    MeanCi throughput;
    MeanCi completion_ratio;
    MeanCi mean_latency;
    MeanCi energy_per_completion;
};

/// Groups runs by (policy, V, lambda multiplier) in order of first
/// appearance. Throws IncompatibleRuns when the structural configs differ.
std::vector<ComparisonRow> compare_runs(std::span<const RunSummary> runs);

} // namespace edgebench::metrics
