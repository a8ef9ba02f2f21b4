#include <edgebench/core/state.hpp>

#include <string>

namespace edgebench {

SystemState::SystemState(const ValidatedConfig& cfg)
    : md_queue(cfg.num_mds()),
      es_queue(cfg.num_links()),
      local_queue(cfg.num_mds()),
      channel_idx(cfg.num_links(), 0),
      energy_md(cfg.num_mds(), 0.0),
      num_mds_(cfg.num_mds()),
      num_ess_(cfg.num_ess()) {}

SystemState SystemState::with_backlog(const ValidatedConfig& cfg,
                                      std::span<const std::int64_t> q,
                                      std::span<const std::int64_t> k,
                                      std::span<const int> channel,
                                      std::span<const std::int64_t> local) {
    SystemState s(cfg);
    for (int i = 0; i < s.num_mds_; ++i) {
        const std::int64_t n = i < static_cast<int>(q.size()) ? q[i] : 0;
        for (std::int64_t t = 0; t < n; ++t) {
            s.md_queue[i].push_back(s.mint_task(i, 0));
        }
        const std::int64_t nl = i < static_cast<int>(local.size()) ? local[i] : 0;
        for (std::int64_t t = 0; t < nl; ++t) {
            const TaskId id = s.mint_task(i, 0);
            s.task(id).location = Location::LocalQueue;
            s.local_queue[i].push_back(id);
        }
        for (int j = 0; j < s.num_ess_; ++j) {
            const std::size_t l = s.link(i, j);
            const std::int64_t nk = l < k.size() ? k[l] : 0;
            for (std::int64_t t = 0; t < nk; ++t) {
                const TaskId id = s.mint_task(i, 0);
                s.task(id).location = Location::EsQueue;
                s.task(id).es = j;
                s.es_queue[l].push_back(id);
            }
        }
    }
    for (std::size_t l = 0; l < s.channel_idx.size() && l < channel.size(); ++l) {
        s.channel_idx[l] = channel[l];
    }
    return s;
}

TaskId SystemState::mint_task(int owner_md, std::int64_t born_slot) {
    const TaskId id = ledger.size();
    TaskEntry e;
    e.id = id;
    e.owner_md = owner_md;
    e.born_slot = born_slot;
    ledger.push_back(e);
    ++counts.arrivals;
    return id;
}

std::int64_t SystemState::es_backlog(int es) const noexcept {
    std::int64_t total = 0;
    for (int i = 0; i < num_mds_; ++i) {
        total += k(i, es);
    }
    return total;
}

std::int64_t SystemState::in_transit_count() const noexcept {
    std::int64_t total = 0;
    for (const auto& b : in_transit) {
        total += static_cast<std::int64_t>(b.tasks.size());
    }
    return total;
}

std::int64_t SystemState::residual() const noexcept {
    std::int64_t total = in_transit_count();
    for (const auto& q : md_queue) total += static_cast<std::int64_t>(q.size());
    for (const auto& q : es_queue) total += static_cast<std::int64_t>(q.size());
    for (const auto& q : local_queue) total += static_cast<std::int64_t>(q.size());
    return total;
}

std::string check_coherence(const SystemState& s) {
    auto where = [](TaskId id) { return "task " + std::to_string(id); };
    std::int64_t queued = 0;
    for (int i = 0; i < s.num_mds(); ++i) {
        for (TaskId id : s.md_queue[i]) {
            const auto& e = s.task(id);
            if (e.location != Location::MdQueue || e.owner_md != i) {
                return where(id) + " listed in MD queue " + std::to_string(i);
            }
            ++queued;
        }
        for (TaskId id : s.local_queue[i]) {
            const auto& e = s.task(id);
            if (e.location != Location::LocalQueue || e.owner_md != i) {
                return where(id) + " listed in local queue " + std::to_string(i);
            }
            ++queued;
        }
        for (int j = 0; j < s.num_ess(); ++j) {
            for (TaskId id : s.es_queue[s.link(i, j)]) {
                const auto& e = s.task(id);
                if (e.location != Location::EsQueue || e.owner_md != i || e.es != j) {
                    return where(id) + " listed in ES queue (" + std::to_string(i) + "," +
                           std::to_string(j) + ")";
                }
                ++queued;
            }
        }
    }
    for (const auto& b : s.in_transit) {
        for (TaskId id : b.tasks) {
            const auto& e = s.task(id);
            if (e.location != Location::InTransit || e.owner_md != b.md) {
                return where(id) + " listed in transit";
            }
            ++queued;
        }
    }

    std::int64_t live = 0;
    std::int64_t completed = 0;
    std::int64_t deadline = 0;
    std::int64_t overflow = 0;
    for (const auto& e : s.ledger) {
        switch (e.location) {
        case Location::Completed:
            ++completed;
            if (e.event_slot < e.born_slot) return where(e.id) + " completed before birth";
            break;
        case Location::Dropped:
            if (e.event_slot < e.born_slot) return where(e.id) + " dropped before birth";
            (e.reason == DropReason::Deadline ? deadline : overflow)++;
            break;
        default:
            ++live;
        }
    }
    if (live != queued) {
        return "ledger has " + std::to_string(live) + " live tasks but queues hold " +
               std::to_string(queued);
    }
    const TaskCounts& c = s.counts;
    if (c.completions != completed || c.drops_deadline != deadline ||
        c.drops_overflow != overflow) {
        return "running counts disagree with ledger";
    }
    if (c.arrivals != static_cast<std::int64_t>(s.ledger.size())) {
        return "arrival count disagrees with ledger size";
    }
    if (c.arrivals != c.completions + c.drops_deadline + c.drops_overflow + s.residual()) {
        return "task conservation violated";
    }
    return {};
}

} // namespace edgebench
