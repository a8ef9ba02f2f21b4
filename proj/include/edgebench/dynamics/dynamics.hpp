#pragma once

#include <edgebench/core/action.hpp>
#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace edgebench::dynamics {

/// Arrival counts a_i(t) for one slot. Each MD draws from its own stream
/// keyed by (seed, slot, md), so counts do not depend on U or on policy.
std::vector<std::int64_t> draw_arrivals(const ValidatedConfig& cfg, std::int64_t slot,
                                        std::uint64_t seed);

/// Steps every (MD, ES) fading chain once by the transition matrix.
std::vector<int> evolve_channels(std::span<const int> channel_idx, const ValidatedConfig& cfg,
                                 std::int64_t slot, std::uint64_t seed);

/// Uplink rate in tasks per slot for each MD. Bandwidth of an ES is split
/// equally among the MDs transmitting to it (associated with power > 0).
std::vector<std::int64_t> transmission_rates(const ValidatedConfig& cfg,
                                              std::span<const int> channel_idx,
                                              const Action& action);

/// Rate an MD would get at `es` with `power` while sharing the ES with
/// `sharers` transmitters in total (itself included).
std::int64_t link_rate(const ValidatedConfig& cfg, int md, int es, int channel, double power,
                       int sharers);

/// Computing rate c_ij per (MD, ES) link: floor(cores * f * tau / w).
std::vector<std::int64_t> computing_rates(const ValidatedConfig& cfg, const Action& action);

/// Everything observed during one slot plus the post-step queue snapshot.
struct SlotRecord {
    std::int64_t slot = 0;
    Action action;

    std::vector<std::int64_t> tx_rate;        // per MD
    std::vector<std::int64_t> comp_rate;      // per link
    std::vector<std::int64_t> arrivals;       // per MD
    std::vector<std::int64_t> uplinked;       // per MD
    std::vector<std::int64_t> completions;    // per link
    std::vector<std::int64_t> local_completions;  // per MD
    std::vector<std::int64_t> drops_deadline;     // per MD (task owner)
    std::vector<std::int64_t> drops_overflow;     // per MD
    std::vector<double> energy;                   // per MD, this slot
    std::int64_t migrated = 0;

    // State after the step.
    std::vector<std::int64_t> q;
    std::vector<std::int64_t> k;
    std::vector<std::int64_t> local_q;
    std::vector<int> channel;
    std::int64_t in_transit = 0;
    TaskCounts cumulative;
    std::int64_t residual = 0;
};

/// Advances the state by one slot. Within the slot: channels evolve, rates
/// are computed, computing queues serve (FIFO), MD queues uplink
/// min(Q, r) tasks, migrations and due transit batches move, local queues
/// serve, arrivals join, expired tasks drop, and energy is charged.
///
/// Throws ActionInvalid when `action` is infeasible for the pre-step state.
SlotRecord step(SystemState& state, const Action& action, const ValidatedConfig& cfg,
                std::uint64_t seed);

} // namespace edgebench::dynamics
