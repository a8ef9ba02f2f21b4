#pragma once

#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>
#include <edgebench/dynamics/dynamics.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace edgebench::metrics {

/// Identifies a run inside a sweep.
struct RunLabel {
    std::string scenario_id;
    std::string policy;
    double V = 0.0;
    double lambda_multiplier = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t comparison_hash = 0;
};

struct RunSummary {
    RunLabel label;
    std::int64_t slots = 0;

    std::int64_t arrivals = 0;
    std::int64_t completions = 0;
    std::int64_t drops_deadline = 0;
    std::int64_t drops_overflow = 0;
    std::int64_t residual = 0;

    double throughput = 0.0;        // completions per slot
    double completion_ratio = 1.0;  // completions / arrivals, 1 when nothing arrived
    // Latency in slots from birth to completion; NaN when nothing completed.
    double mean_latency = std::numeric_limits<double>::quiet_NaN();
    double p95_latency = std::numeric_limits<double>::quiet_NaN();

    double energy_total = 0.0;
    std::vector<double> energy_per_md;
    // Infinite when nothing completed.
    double energy_per_completion = std::numeric_limits<double>::infinity();

    // Time averages of end-of-slot occupancy.
    double mean_q_total = 0.0;
    double mean_k_total = 0.0;
    double mean_local_total = 0.0;
    double mean_in_transit = 0.0;
    std::vector<double> mean_q;      // per MD
    std::vector<double> mean_k;      // per link
    std::vector<double> mean_backlog_es;
    // Coefficient of variation of mean_backlog_es.
    double load_imbalance = 0.0;

    std::int64_t drops() const noexcept { return drops_deadline + drops_overflow; }
};

/// Folds SlotRecords into the time averages needed by summarize().
class SummaryAccumulator {
public:
    explicit SummaryAccumulator(const ValidatedConfig& cfg);

    void add(const dynamics::SlotRecord& rec);

    std::int64_t slots() const noexcept { return slots_; }

private:
    friend RunSummary summarize(const SummaryAccumulator&, const SystemState&,
                                const ValidatedConfig&, RunLabel);

    int num_mds_;
    int num_ess_;
    std::int64_t slots_ = 0;
    double sum_q_total_ = 0.0;
    double sum_k_total_ = 0.0;
    double sum_local_total_ = 0.0;
    double sum_transit_ = 0.0;
    std::vector<double> sum_q_;
    std::vector<double> sum_k_;
};

/// End-of-run aggregates. Latencies come from the ledger (completion slot
/// minus birth slot; result download time is not modelled). Dropped tasks
/// count toward drops only.
RunSummary summarize(const SummaryAccumulator& acc, const SystemState& final_state,
                     const ValidatedConfig& cfg, RunLabel label);

/// Nearest-rank percentile of a sample, q in (0, 1].
double percentile(std::vector<std::int64_t> values, double q);

} // namespace edgebench::metrics
