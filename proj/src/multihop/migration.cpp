#include <edgebench/multihop/migration.hpp>

#include <algorithm>
#include <numeric>

namespace edgebench::multihop {

namespace {

int link_between(const ScenarioConfig& cfg, int a, int b) {
    for (std::size_t l = 0; l < cfg.backhaul_links.size(); ++l) {
        const auto& link = cfg.backhaul_links[l];
        if ((link.es_a == a && link.es_b == b) || (link.es_a == b && link.es_b == a)) {
            return static_cast<int>(l);
        }
    }
    return -1;
}

} // namespace

std::vector<Migration> plan_migrations(const SystemState& state, const ValidatedConfig& cfg,
                                       double threshold) {
    const int U = cfg.num_mds();
    const int J = cfg.num_ess();
    std::vector<std::int64_t> backlog(J);
    for (int j = 0; j < J; ++j) backlog[j] = state.es_backlog(j);
    std::vector<std::int64_t> k(cfg.num_links());
    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < J; ++j) k[cfg.link(i, j)] = state.k(i, j);
    }

    auto service = [&](int es) {
        return static_cast<double>(cfg.cores(es)) * static_cast<double>(cfg.per_core_rate());
    };

    std::vector<Migration> plan;
    for (const auto& link : cfg.raw().backhaul_links) {
        int from = -1;
        int to = -1;
        const std::int64_t ab = backlog[link.es_a] - backlog[link.es_b];
        if (static_cast<double>(ab) > threshold + 2.0 * link.delay_slots * service(link.es_b)) {
            from = link.es_a;
            to = link.es_b;
        } else if (static_cast<double>(-ab) >
                   threshold + 2.0 * link.delay_slots * service(link.es_a)) {
            from = link.es_b;
            to = link.es_a;
        }
        if (from < 0) {
            continue;
        }
        std::int64_t remaining =
            std::min(link.capacity_tasks_per_slot, (backlog[from] - backlog[to]) / 2);
        if (remaining <= 0) {
            continue;
        }

        std::vector<int> order(U);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return k[cfg.link(x, from)] > k[cfg.link(y, from)];
        });
        for (int i : order) {
            if (remaining == 0) break;
            const std::int64_t take = std::min(remaining, k[cfg.link(i, from)]);
            if (take <= 0) continue;
            plan.push_back({from, to, i, take});
            k[cfg.link(i, from)] -= take;
            k[cfg.link(i, to)] += take;
            backlog[from] -= take;
            backlog[to] += take;
            remaining -= take;
        }
    }
    return plan;
}

std::int64_t apply_migrations(SystemState& state, std::span<const Migration> moves,
                              const ValidatedConfig& cfg) {
    std::int64_t moved = 0;
    for (const auto& m : moves) {
        const int l = link_between(cfg.raw(), m.from_es, m.to_es);
        if (l < 0 || m.count <= 0) {
            continue;
        }
        auto& src = state.es_queue[state.link(m.md, m.from_es)];
        const auto n = std::min<std::int64_t>(m.count, static_cast<std::int64_t>(src.size()));
        if (n == 0) {
            continue;
        }
        TransitBatch batch;
        batch.link = l;
        batch.md = m.md;
        batch.to_es = m.to_es;
        batch.arrive_slot = state.slot + cfg.raw().backhaul_links[l].delay_slots;
        batch.tasks.reserve(n);
        for (std::int64_t c = 0; c < n; ++c) {
            const TaskId id = src.front();
            src.pop_front();
            auto& e = state.task(id);
            e.location = Location::InTransit;
            e.es = m.to_es;
            e.link = l;
            e.event_slot = batch.arrive_slot;
            batch.tasks.push_back(id);
        }
        moved += n;
        state.in_transit.push_back(std::move(batch));
    }
    return moved;
}

std::vector<TransitBatch> advance_in_transit(SystemState& state) {
    std::vector<TransitBatch> delivered;
    std::vector<TransitBatch> pending;
    for (auto& batch : state.in_transit) {
        if (batch.arrive_slot > state.slot) {
            pending.push_back(std::move(batch));
            continue;
        }
        auto& dst = state.es_queue[state.link(batch.md, batch.to_es)];
        for (TaskId id : batch.tasks) {
            auto& e = state.task(id);
            e.location = Location::EsQueue;
            e.es = batch.to_es;
            e.link = -1;
            e.event_slot = -1;
            dst.push_back(id);
        }
        delivered.push_back(std::move(batch));
    }
    state.in_transit = std::move(pending);
    return delivered;
}

} // namespace edgebench::multihop
