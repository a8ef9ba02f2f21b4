#pragma once

#include <edgebench/core/config.hpp>

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace edgebench {

using TaskId = std::uint64_t;

enum class Location : std::uint8_t {
    MdQueue,
    EsQueue,
    InTransit,
    LocalQueue,
    Completed,
    Dropped,
};

enum class DropReason : std::uint8_t { None, Deadline, Overflow };

struct TaskEntry {
    TaskId id = 0;
    int owner_md = 0;
    std::int64_t born_slot = 0;
    Location location = Location::MdQueue;
    // ES holding the task (EsQueue), or the destination ES while in transit.
    int es = -1;
    // Backhaul link index while in transit.
    int link = -1;
    // Arrival slot while in transit, completion or drop slot afterwards.
    std::int64_t event_slot = -1;
    DropReason reason = DropReason::None;
    double energy_spent = 0.0;
};

struct TransitBatch {
    int link = 0;
    int md = 0;
    int to_es = 0;
    std::int64_t arrive_slot = 0;
    std::vector<TaskId> tasks;
};

/// Running totals of where tasks went; conservation means
/// arrivals == completions + drops + residual().
struct TaskCounts {
    std::int64_t arrivals = 0;
    std::int64_t completions = 0;
    std::int64_t drops_deadline = 0;
    std::int64_t drops_overflow = 0;
};

/// Per-slot dynamic state. Queue lengths are the sizes of the FIFO id
/// lists, so the scalar view and the ledger cannot drift apart.
class SystemState {
public:
    explicit SystemState(const ValidatedConfig& cfg);

    /// A state with the given backlogs filled with synthetic tasks born at
    /// slot 0. Used to probe policies and the MDP at arbitrary points.
    static SystemState with_backlog(const ValidatedConfig& cfg, std::span<const std::int64_t> q,
                                    std::span<const std::int64_t> k,
                                    std::span<const int> channel,
                                    std::span<const std::int64_t> local = {});

    int num_mds() const noexcept { return num_mds_; }
    int num_ess() const noexcept { return num_ess_; }

    std::int64_t q(int md) const noexcept {
        return static_cast<std::int64_t>(md_queue[md].size());
    }
    std::int64_t k(int md, int es) const noexcept {
        return static_cast<std::int64_t>(es_queue[link(md, es)].size());
    }
    std::int64_t local(int md) const noexcept {
        return static_cast<std::int64_t>(local_queue[md].size());
    }
    int channel(int md, int es) const noexcept { return channel_idx[link(md, es)]; }

    /// Total computing backlog at an ES over all MDs.
    std::int64_t es_backlog(int es) const noexcept;
    std::int64_t in_transit_count() const noexcept;
    /// Tasks still in the system (all queues plus in transit).
    std::int64_t residual() const noexcept;

    std::size_t link(int md, int es) const noexcept {
        return static_cast<std::size_t>(md) * num_ess_ + es;
    }

    TaskEntry& task(TaskId id) { return ledger[id]; }
    const TaskEntry& task(TaskId id) const { return ledger[id]; }

    TaskId mint_task(int owner_md, std::int64_t born_slot);

    std::int64_t slot = 0;
    std::vector<std::deque<TaskId>> md_queue;
    // Indexed by link(md, es).
    std::vector<std::deque<TaskId>> es_queue;
    std::vector<std::deque<TaskId>> local_queue;
    std::vector<int> channel_idx;
    std::vector<TransitBatch> in_transit;
    // Indexed by TaskId; ids are minted densely from 0.
    std::vector<TaskEntry> ledger;
    TaskCounts counts;
    std::vector<double> energy_md;

private:
    int num_mds_;
    int num_ess_;
};

/// Verifies that every queued id carries the matching ledger location and
/// that the counts agree with the ledger. Returns an empty string on success,
/// otherwise a description of the first mismatch.
std::string check_coherence(const SystemState& state);

} // namespace edgebench
