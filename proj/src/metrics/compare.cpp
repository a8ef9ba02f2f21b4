#include <edgebench/metrics/compare.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace edgebench::metrics {

MeanCi mean_ci95(std::span<const double> samples) {
    MeanCi out;
    const auto n = samples.size();
    if (n == 0) {
        out.mean = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    if (n < 2 || !std::isfinite(out.mean)) {
        return out;
    }
    // The summed mean of equal samples can be off by an ulp.
    if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples[0]; })) {
        out.mean = samples[0];
        return out;
    }
    double ss = 0.0;
    for (double x : samples) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(dist, 0.975);
    out.half_width = t * sd / std::sqrt(static_cast<double>(n));
    return out;
}

std::vector<ComparisonRow> compare_runs(std::span<const RunSummary> runs) {
    std::vector<ComparisonRow> rows;
    if (runs.empty()) {
        return rows;
    }
    const auto hash = runs.front().label.comparison_hash;
    using Key = std::tuple<std::string, double, double>;
    std::vector<Key> keys;
    std::vector<std::vector<const RunSummary*>> groups;
    for (const auto& r : runs) {
        if (r.label.comparison_hash != hash) {
            throw IncompatibleRuns("run '" + r.label.scenario_id + "' (policy " + r.label.policy +
                                   ") has a different structural configuration");
        }
        Key key{r.label.policy, r.label.V, r.label.lambda_multiplier};
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            groups.emplace_back();
            it = std::prev(keys.end());
        }
        groups[static_cast<std::size_t>(it - keys.begin())].push_back(&r);
    }

    for (std::size_t g = 0; g < keys.size(); ++g) {
        ComparisonRow row;
        std::tie(row.policy, row.V, row.lambda_multiplier) = keys[g];
        row.runs = groups[g].size();
        auto collect = [&](auto field) {
            std::vector<double> xs;
            for (const RunSummary* r : groups[g]) xs.push_back(field(*r));
            return mean_ci95(xs);
        };
        row.throughput = collect([](const RunSummary& r) { return r.throughput; });
        row.completion_ratio = collect([](const RunSummary& r) { return r.completion_ratio; });
        row.mean_latency = collect([](const RunSummary& r) { return r.mean_latency; });
        row.energy_per_completion =
            collect([](const RunSummary& r) { return r.energy_per_completion; });
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace edgebench::metrics
