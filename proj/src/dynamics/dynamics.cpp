#include <edgebench/dynamics/dynamics.hpp>

#include <edgebench/core/rng.hpp>
#include <edgebench/multihop/migration.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace edgebench::dynamics {

namespace {

std::int64_t sample_poisson(StreamRng& rng, double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    if (mean > 200.0) {
        std::poisson_distribution<std::int64_t> dist(mean);
        return dist(rng);
    }
    // Sequential inversion.
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::int64_t k = 0;
    while (u > cdf && p > 0.0) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Tasks the deadline no longer allows to complete: at the end of slot t a
// task with t + 1 - born > D could only finish with latency above D.
bool expired(const TaskEntry& e, std::int64_t slot, std::int64_t deadline) {
    return deadline > 0 && slot + 1 - e.born_slot > deadline;
}

void complete(SystemState& s, TaskId id, std::int64_t slot) {
    auto& e = s.task(id);
    e.location = Location::Completed;
    e.event_slot = slot;
    ++s.counts.completions;
}

void drop(SystemState& s, TaskId id, std::int64_t slot, DropReason reason) {
    auto& e = s.task(id);
    e.location = Location::Dropped;
    e.event_slot = slot;
    e.reason = reason;
    (reason == DropReason::Deadline ? s.counts.drops_deadline : s.counts.drops_overflow)++;
}

// Removes expired ids from a FIFO whose entries are ordered by birth.
void expire_front(std::deque<TaskId>& q, const SystemState& s, std::int64_t slot,
                  std::int64_t deadline, std::vector<TaskId>& out) {
    while (!q.empty() && expired(s.task(q.front()), slot, deadline)) {
        out.push_back(q.front());
        q.pop_front();
    }
}

template <typename Seq>
void expire_scan(Seq& q, const SystemState& s, std::int64_t slot, std::int64_t deadline,
                 std::vector<TaskId>& out) {
    std::erase_if(q, [&](TaskId id) {
        if (expired(s.task(id), slot, deadline)) {
            out.push_back(id);
            return true;
        }
        return false;
    });
}

} // namespace

std::vector<std::int64_t> draw_arrivals(const ValidatedConfig& cfg, std::int64_t slot,
                                        std::uint64_t seed) {
    const auto& raw = cfg.raw();
    std::vector<std::int64_t> a(cfg.num_mds(), 0);
    for (int i = 0; i < cfg.num_mds(); ++i) {
        const double rate = raw.arrival_rates[i];
        if (rate <= 0.0) {
            continue;
        }
        StreamRng rng(seed, StreamPurpose::Arrivals, static_cast<std::uint64_t>(slot),
                      static_cast<std::uint64_t>(i));
        if (raw.arrival_kind == ArrivalKind::Bernoulli) {
            a[i] = rng.uniform() < rate ? 1 : 0;
        } else {
            a[i] = sample_poisson(rng, rate);
        }
    }
    return a;
}

std::vector<int> evolve_channels(std::span<const int> channel_idx, const ValidatedConfig& cfg,
                                 std::int64_t slot, std::uint64_t seed) {
    const auto& matrix = cfg.raw().channel_transition;
    std::vector<int> next(channel_idx.begin(), channel_idx.end());
    if (matrix.size() <= 1) {
        return next;
    }
    for (std::size_t l = 0; l < next.size(); ++l) {
        const auto& row = matrix[static_cast<std::size_t>(channel_idx[l])];
        StreamRng rng(seed, StreamPurpose::Channel, static_cast<std::uint64_t>(slot), l);
        const double u = rng.uniform();
        double cdf = 0.0;
        int chosen = -1;
        int last_positive = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c] <= 0.0) continue;
            last_positive = static_cast<int>(c);
            cdf += row[c];
            if (u < cdf) {
                chosen = static_cast<int>(c);
                break;
            }
        }
        // Rows may sum to 1 - 1e-12; the last reachable state absorbs the gap.
        next[l] = chosen >= 0 ? chosen : last_positive;
    }
    return next;
}

std::int64_t link_rate(const ValidatedConfig& cfg, int md, int es, int channel, double power,
                       int sharers) {
    if (power <= 0.0 || sharers <= 0) {
        return 0;
    }
    const auto& raw = cfg.raw();
    const double share = raw.bandwidth_hz / sharers;
    const double gain = cfg.gain(md, es) * raw.channel_states[static_cast<std::size_t>(channel)];
    const double snr = power * gain / (raw.noise_psd * share);
    const double bits = raw.slot_duration * share * std::log2(1.0 + snr);
    // The epsilon absorbs rounding in exact cases such as 1e5 / 5e4.
    return static_cast<std::int64_t>(std::floor(bits / raw.task_size_bits + 1e-9));
}

std::vector<std::int64_t> transmission_rates(const ValidatedConfig& cfg,
                                              std::span<const int> channel_idx,
                                              const Action& action) {
    const int U = cfg.num_mds();
    std::vector<int> sharers(cfg.num_ess(), 0);
    for (int i = 0; i < U; ++i) {
        if (action.assoc[i] != kUnassociated && action.power[i] > 0.0) {
            ++sharers[action.assoc[i]];
        }
    }
    std::vector<std::int64_t> r(U, 0);
    for (int i = 0; i < U; ++i) {
        const int j = action.assoc[i];
        if (j == kUnassociated || action.power[i] <= 0.0) {
            continue;
        }
        r[i] = link_rate(cfg, i, j, channel_idx[cfg.link(i, j)], action.power[i], sharers[j]);
    }
    return r;
}

std::vector<std::int64_t> computing_rates(const ValidatedConfig& cfg, const Action& action) {
    std::vector<std::int64_t> c(cfg.num_links(), 0);
    const double cycles = cfg.core_cycles_per_slot();
    for (std::size_t l = 0; l < c.size(); ++l) {
        const int cores = action.cores[l];
        if (cores > 0) {
            c[l] = static_cast<std::int64_t>(
                std::floor(cores * cycles / cfg.raw().task_cycles + 1e-9));
        }
    }
    return c;
}

SlotRecord step(SystemState& s, const Action& action, const ValidatedConfig& cfg,
                std::uint64_t seed) {
    require_valid_action(action, s, cfg);

    const auto& raw = cfg.raw();
    const int U = cfg.num_mds();
    const int J = cfg.num_ess();
    const std::int64_t t = s.slot;

    SlotRecord rec;
    rec.slot = t;
    rec.action = action;
    rec.arrivals.assign(U, 0);
    rec.uplinked.assign(U, 0);
    rec.completions.assign(cfg.num_links(), 0);
    rec.local_completions.assign(U, 0);
    rec.drops_deadline.assign(U, 0);
    rec.drops_overflow.assign(U, 0);
    rec.energy.assign(U, 0.0);

    s.channel_idx = evolve_channels(s.channel_idx, cfg, t, seed);

    rec.tx_rate = transmission_rates(cfg, s.channel_idx, action);
    rec.comp_rate = computing_rates(cfg, action);

    // Serve computing queues.
    for (std::size_t l = 0; l < s.es_queue.size(); ++l) {
        auto& q = s.es_queue[l];
        const auto n = std::min<std::int64_t>(rec.comp_rate[l], static_cast<std::int64_t>(q.size()));
        for (std::int64_t c = 0; c < n; ++c) {
            complete(s, q.front(), t);
            q.pop_front();
        }
        rec.completions[l] = n;
    }

    // Uplink into the associated ES.
    for (int i = 0; i < U; ++i) {
        const int j = action.assoc[i];
        if (j != kUnassociated && action.power[i] > 0.0) {
            const double joules = action.power[i] * raw.slot_duration;
            s.energy_md[i] += joules;
            rec.energy[i] += joules;
        }
        if (j == kUnassociated) {
            continue;
        }
        auto& src = s.md_queue[i];
        auto& dst = s.es_queue[cfg.link(i, j)];
        const auto n = std::min<std::int64_t>(rec.tx_rate[i], static_cast<std::int64_t>(src.size()));
        const double per_task = n > 0 ? action.power[i] * raw.slot_duration / n : 0.0;
        for (std::int64_t c = 0; c < n; ++c) {
            const TaskId id = src.front();
            src.pop_front();
            auto& e = s.task(id);
            e.energy_spent += per_task;
            if (raw.queue_caps.k_max > 0 &&
                static_cast<std::int64_t>(dst.size()) >= raw.queue_caps.k_max) {
                drop(s, id, t, DropReason::Overflow);
                ++rec.drops_overflow[i];
                continue;
            }
            e.location = Location::EsQueue;
            e.es = j;
            dst.push_back(id);
        }
        rec.uplinked[i] = n;
    }

    // Backhaul moves.
    rec.migrated = multihop::apply_migrations(s, action.migrate, cfg);
    multihop::advance_in_transit(s);

    // Local computing.
    if (raw.local_compute) {
        const double f = raw.local_compute->local_core_speed_hz;
        const double active_joules =
            raw.local_compute->local_energy_coeff * f * f * f * raw.slot_duration;
        for (int i = 0; i < U; ++i) {
            auto& q = s.local_queue[i];
            const auto n = std::min<std::int64_t>(cfg.local_rate(), static_cast<std::int64_t>(q.size()));
            if (n <= 0) continue;
            for (std::int64_t c = 0; c < n; ++c) {
                s.task(q.front()).energy_spent += active_joules / n;
                complete(s, q.front(), t);
                q.pop_front();
            }
            rec.local_completions[i] = n;
            s.energy_md[i] += active_joules;
            rec.energy[i] += active_joules;
        }
    }

    // Arrivals: the first local_admit[i] go to the local queue.
    rec.arrivals = draw_arrivals(cfg, t, seed);
    for (int i = 0; i < U; ++i) {
        for (std::int64_t c = 0; c < rec.arrivals[i]; ++c) {
            const TaskId id = s.mint_task(i, t);
            if (c < action.local_admit[i]) {
                s.task(id).location = Location::LocalQueue;
                s.local_queue[i].push_back(id);
                continue;
            }
            if (raw.queue_caps.q_max > 0 &&
                static_cast<std::int64_t>(s.md_queue[i].size()) >= raw.queue_caps.q_max) {
                drop(s, id, t, DropReason::Overflow);
                ++rec.drops_overflow[i];
                continue;
            }
            s.md_queue[i].push_back(id);
        }
    }

    // Deadline expiry, oldest first.
    if (raw.deadline_slots > 0) {
        const std::int64_t D = raw.deadline_slots;
        std::vector<TaskId> gone;
        for (int i = 0; i < U; ++i) {
            expire_front(s.md_queue[i], s, t, D, gone);
            expire_front(s.local_queue[i], s, t, D, gone);
            for (int j = 0; j < J; ++j) {
                auto& q = s.es_queue[cfg.link(i, j)];
                // Migrations can interleave births, so scan fully when links exist.
                if (raw.backhaul_links.empty()) {
                    expire_front(q, s, t, D, gone);
                } else {
                    expire_scan(q, s, t, D, gone);
                }
            }
        }
        for (auto& batch : s.in_transit) {
            expire_scan(batch.tasks, s, t, D, gone);
        }
        std::erase_if(s.in_transit, [](const TransitBatch& b) { return b.tasks.empty(); });
        std::sort(gone.begin(), gone.end(), [&](TaskId a, TaskId b) {
            const auto& ea = s.task(a);
            const auto& eb = s.task(b);
            return ea.born_slot != eb.born_slot ? ea.born_slot < eb.born_slot : a < b;
        });
        for (TaskId id : gone) {
            drop(s, id, t, DropReason::Deadline);
            ++rec.drops_deadline[s.task(id).owner_md];
        }
    }

    s.slot = t + 1;

    rec.q.resize(U);
    rec.local_q.resize(U);
    rec.k.resize(cfg.num_links());
    for (int i = 0; i < U; ++i) {
        rec.q[i] = s.q(i);
        rec.local_q[i] = s.local(i);
        for (int j = 0; j < J; ++j) rec.k[cfg.link(i, j)] = s.k(i, j);
    }
    rec.channel = s.channel_idx;
    rec.in_transit = s.in_transit_count();
    rec.cumulative = s.counts;
    rec.residual = s.residual();
    return rec;
}

} // namespace edgebench::dynamics
