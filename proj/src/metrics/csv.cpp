#include <edgebench/metrics/csv.hpp>

#include <fmt/format.h>

#include <array>
#include <cmath>

namespace edgebench::metrics {

namespace {

constexpr std::array<std::string_view, 18> kSummaryColumns{
    "scenario_id",   "policy",          "V",
    "lambda_multiplier", "seed",        "arrivals",
    "completions",   "drops_deadline",  "drops_overflow",
    "throughput",    "completion_ratio", "mean_latency_slots",
    "p95_latency_slots", "energy_J_total", "energy_J_per_completion",
    "mean_Q",        "mean_K",          "load_imbalance",
};

std::string join(std::span<const std::string_view> cols) {
    std::string out;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += cols[c];
    }
    return out;
}

} // namespace

// Scenario ids are user-provided; quote when they would break the row.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

std::span<const std::string_view> summary_columns() { return kSummaryColumns; }

std::string summary_header() { return join(kSummaryColumns); }

std::string summary_row(const RunSummary& s) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                       csv_field(s.label.scenario_id), csv_field(s.label.policy),
                       format_number(s.label.V), format_number(s.label.lambda_multiplier),
                       s.label.seed, s.arrivals, s.completions, s.drops_deadline,
                       s.drops_overflow, format_number(s.throughput),
                       format_number(s.completion_ratio), format_number(s.mean_latency),
                       format_number(s.p95_latency), format_number(s.energy_total),
                       format_number(s.energy_per_completion), format_number(s.mean_q_total),
                       format_number(s.mean_k_total), format_number(s.load_imbalance));
}

std::string comparison_header() {
    return "policy,V,lambda_multiplier,runs,"
           "throughput_mean,throughput_ci95,"
           "completion_ratio_mean,completion_ratio_ci95,"
           "mean_latency_mean,mean_latency_ci95,"
           "energy_per_completion_mean,energy_per_completion_ci95";
}

std::string comparison_row(const ComparisonRow& r) {
    auto pair = [](const MeanCi& m) {
        return format_number(m.mean) + "," + format_number(m.half_width);
    };
    return fmt::format("{},{},{},{},{},{},{},{}", csv_field(r.policy), format_number(r.V),
                       format_number(r.lambda_multiplier), r.runs, pair(r.throughput),
                       pair(r.completion_ratio), pair(r.mean_latency),
                       pair(r.energy_per_completion));
}

std::string trace_header() {
    return "slot,md_id,es_id,Q,K,channel,power_W,assoc,cores,tx_rate,comp_rate,arrivals,"
           "uplinked,completions,local_Q,local_completions,drops_deadline,drops_overflow,"
           "energy_J";
}

void append_trace_rows(std::string& out, const dynamics::SlotRecord& rec, int num_mds,
                       int num_ess) {
    for (int i = 0; i < num_mds; ++i) {
        for (int j = 0; j < num_ess; ++j) {
            const auto l = static_cast<std::size_t>(i) * num_ess + j;
            fmt::format_to(std::back_inserter(out),
                           "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                           rec.slot, i, j, rec.q[i], rec.k[l], rec.channel[l],
                           format_number(rec.action.power[i]), rec.action.eta(i, j),
                           rec.action.cores[l], rec.tx_rate[i], rec.comp_rate[l],
                           rec.arrivals[i], rec.uplinked[i], rec.completions[l], rec.local_q[i],
                           rec.local_completions[i], rec.drops_deadline[i],
                           rec.drops_overflow[i], format_number(rec.energy[i]));
        }
    }
}

} // namespace edgebench::metrics
