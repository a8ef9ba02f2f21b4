#pragma once

#include <edgebench/core/action.hpp>
#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace edgebench::multihop {

/// Threshold-halving load balancing over backhaul links.
///
/// Links are visited in declaration order against running backlogs, so a
/// later link sees the effect of earlier moves. A link moves work from the
/// heavier endpoint j to the lighter one j' when B_j - B_j' exceeds
/// `threshold + 2 * delay_slots * service(j')`, where service(j') is the
/// per-slot core capacity of j'. The amount is min(capacity, floor(diff / 2)),
/// drawn from the largest per-MD queues at j first.
std::vector<Migration> plan_migrations(const SystemState& state, const ValidatedConfig& cfg,
                                       double threshold);

/// Moves the oldest tasks of each listed queue onto its link. Counts are
/// clamped to what the queue still holds. Returns the number of tasks moved.
std::int64_t apply_migrations(SystemState& state, std::span<const Migration> moves,
                              const ValidatedConfig& cfg);

/// Delivers every batch due at or before the current slot to the back of its
/// destination queue, preserving intra-batch order.
std::vector<TransitBatch> advance_in_transit(SystemState& state);

} // namespace edgebench::multihop
