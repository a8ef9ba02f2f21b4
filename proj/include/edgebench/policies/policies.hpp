#pragma once

#include <edgebench/core/action.hpp>
#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>

#include <cstdint>
#include <span>

namespace edgebench::policies {

// Every decide_* function is a pure function of its arguments. Ties break
// toward the lowest ES, power level and MD index.

/// Channel-only baseline: a backlogged MD sends at maximum power to the ES
/// with the best instantaneous gain; cores are split evenly.
Action decide_transmission_based(const SystemState& state, const ValidatedConfig& cfg);

/// Compute-only baseline: a backlogged MD sends at maximum power to the ES
/// with the smallest total computing backlog; cores go to the largest
/// backlogs first.
Action decide_computation_based(const SystemState& state, const ValidatedConfig& cfg);

/// Max-weight on the differential backlog max(Q_i - K_ij, 0) times the
/// achievable rate, minus V * p * tau for transmit energy. Rates account for
/// bandwidth sharing through one provisional pass. Cores are assigned one at
/// a time to the queue with the largest remaining backlog.
Action decide_backpressure(const SystemState& state, const ValidatedConfig& cfg, double V);

/// Admits arrivals to the local queue while it holds fewer than `theta`
/// tasks and offloads the rest with decide_backpressure(V).
/// Throws LocalComputeDisabled when the scenario has no local computing.
Action decide_local_offload_threshold(const SystemState& state, const ValidatedConfig& cfg,
                                      double theta, double V);

/// Uniform choice among the (ES, positive power) options of each
/// backlogged MD, drawn from the (seed, slot, MD) policy stream.
Action decide_random_feasible(const SystemState& state, const ValidatedConfig& cfg,
                              std::uint64_t seed);

struct WeightChoice {
    int es = kUnassociated;
    int power_index = 0;
    double weight = 0.0;

    bool idle() const noexcept { return es == kUnassociated; }
};

/// Argmax over weights laid out as weights[es * num_power + p] where p
/// indexes the non-zero power levels. Returns idle when no weight is
/// positive.
WeightChoice argmax_weight(std::span<const double> weights, int num_ess, int num_power);

/// max(q - k, 0) * rate - V * power * slot_duration
double backpressure_weight(std::int64_t q, std::int64_t k, std::int64_t rate, double V,
                           double power, double slot_duration);

// Core allocation rules, shared with tests.
void split_cores_evenly(const SystemState& state, const ValidatedConfig& cfg, Action& action);
void assign_cores_largest_first(const SystemState& state, const ValidatedConfig& cfg,
                                Action& action);
void assign_cores_greedy(const SystemState& state, const ValidatedConfig& cfg, Action& action);

} // namespace edgebench::policies
