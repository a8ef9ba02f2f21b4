#include <edgebench/metrics/summary.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgebench::metrics {

SummaryAccumulator::SummaryAccumulator(const ValidatedConfig& cfg)
    : num_mds_(cfg.num_mds()),
      num_ess_(cfg.num_ess()),
      sum_q_(cfg.num_mds(), 0.0),
      sum_k_(cfg.num_links(), 0.0) {}

void SummaryAccumulator::add(const dynamics::SlotRecord& rec) {
    ++slots_;
    for (int i = 0; i < num_mds_; ++i) {
        sum_q_[i] += static_cast<double>(rec.q[i]);
        sum_q_total_ += static_cast<double>(rec.q[i]);
        sum_local_total_ += static_cast<double>(rec.local_q[i]);
    }
    for (std::size_t l = 0; l < sum_k_.size(); ++l) {
        sum_k_[l] += static_cast<double>(rec.k[l]);
        sum_k_total_ += static_cast<double>(rec.k[l]);
    }
    sum_transit_ += static_cast<double>(rec.in_transit);
}

double percentile(std::vector<std::int64_t> values, double q) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return static_cast<double>(values[rank - 1]);
}

RunSummary summarize(const SummaryAccumulator& acc, const SystemState& state,
                     const ValidatedConfig& cfg, RunLabel label) {
    RunSummary s;
    s.label = std::move(label);
    s.slots = acc.slots_;
    s.arrivals = state.counts.arrivals;
    s.completions = state.counts.completions;
    s.drops_deadline = state.counts.drops_deadline;
    s.drops_overflow = state.counts.drops_overflow;
    s.residual = state.residual();

    const double T = static_cast<double>(acc.slots_);
    s.throughput = acc.slots_ > 0 ? static_cast<double>(s.completions) / T : 0.0;
    s.completion_ratio =
        s.arrivals > 0 ? static_cast<double>(s.completions) / static_cast<double>(s.arrivals) : 1.0;

    std::vector<std::int64_t> latencies;
    latencies.reserve(static_cast<std::size_t>(s.completions));
    for (const auto& e : state.ledger) {
        if (e.location == Location::Completed) {
            latencies.push_back(e.event_slot - e.born_slot);
        }
    }
    if (!latencies.empty()) {
        const double total = std::accumulate(latencies.begin(), latencies.end(), 0.0);
        s.mean_latency = total / static_cast<double>(latencies.size());
        s.p95_latency = percentile(std::move(latencies), 0.95);
    }

    s.energy_per_md = state.energy_md;
    s.energy_total = std::accumulate(state.energy_md.begin(), state.energy_md.end(), 0.0);
    if (s.completions > 0) {
        s.energy_per_completion = s.energy_total / static_cast<double>(s.completions);
    }

    const int U = cfg.num_mds();
    const int J = cfg.num_ess();
    s.mean_q.assign(U, 0.0);
    s.mean_k.assign(cfg.num_links(), 0.0);
    s.mean_backlog_es.assign(J, 0.0);
    if (acc.slots_ > 0) {
        s.mean_q_total = acc.sum_q_total_ / T;
        s.mean_k_total = acc.sum_k_total_ / T;
        s.mean_local_total = acc.sum_local_total_ / T;
        s.mean_in_transit = acc.sum_transit_ / T;
        for (int i = 0; i < U; ++i) {
            s.mean_q[i] = acc.sum_q_[i] / T;
            for (int j = 0; j < J; ++j) {
                const double k = acc.sum_k_[cfg.link(i, j)] / T;
                s.mean_k[cfg.link(i, j)] = k;
                s.mean_backlog_es[j] += k;
            }
        }
    }
    const double mean_b =
        std::accumulate(s.mean_backlog_es.begin(), s.mean_backlog_es.end(), 0.0) / J;
    if (mean_b > 0.0) {
        double var = 0.0;
        for (double b : s.mean_backlog_es) var += (b - mean_b) * (b - mean_b);
        var /= J;
        s.load_imbalance = std::sqrt(var) / mean_b;
    }
    return s;
}

} // namespace edgebench::metrics
