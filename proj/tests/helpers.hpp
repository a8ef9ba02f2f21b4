#pragma once

#include <edgebench/core/config.hpp>
#include <edgebench/core/rng.hpp>
#include <edgebench/core/state.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace edgebench::test_util {

/// U MDs and J ESs with the library defaults, rate `lambda` everywhere and
/// `cores` cores per ES.
inline ScenarioConfig scenario(int U, int J, double lambda = 0.3, int cores = 2) {
    ScenarioConfig c;
    c.num_mds = U;
    c.num_ess = J;
    c.arrival_rates.assign(U, lambda);
    c.cores_per_es.assign(J, cores);
    return c;
}

/// A random but valid scenario with at most `max_u` MDs and `max_j` ESs.
inline ScenarioConfig random_scenario(std::mt19937_64& rng, int max_u, int max_j) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    ScenarioConfig c = scenario(pick(1, max_u), pick(1, max_j));
    c.rng_seed = rng();
    for (auto& r : c.arrival_rates) r = real(0.0, 1.0);
    for (auto& m : c.cores_per_es) m = pick(0, 4);
    c.task_cycles = real(5e7, 4e8);
    c.task_size_bits = real(2e5, 3e6);
    c.deadline_slots = pick(0, 1) ? pick(1, 30) : 0;
    c.power_levels = pick(0, 1) ? std::vector<double>{0.0, 0.1} : std::vector<double>{0.0, 0.02, 0.2};
    if (pick(0, 1)) {
        c.arrival_kind = ArrivalKind::Poisson;
        for (auto& r : c.arrival_rates) r = real(0.0, 2.5);
    }
    if (pick(0, 2) == 0) {
        c.local_compute = LocalCompute{real(2e8, 2e9), 1e-27};
    }
    if (c.num_ess >= 2 && pick(0, 1)) {
        BackhaulLink l;
        l.es_a = 0;
        l.es_b = 1;
        l.delay_slots = pick(0, 3);
        l.capacity_tasks_per_slot = pick(1, 5);
        c.backhaul_links.push_back(l);
    }
    if (pick(0, 3) == 0) {
        c.queue_caps.q_max = pick(1, 8);
        c.queue_caps.k_max = pick(1, 8);
    }
    return c;
}

inline std::vector<std::int64_t> filled(std::size_t n, std::int64_t v) {
    return std::vector<std::int64_t>(n, v);
}

/// A state with random backlogs up to `max_backlog` and random channels.
inline SystemState random_state(const ValidatedConfig& cfg, std::mt19937_64& rng,
                                std::int64_t max_backlog) {
    std::uniform_int_distribution<std::int64_t> len(0, max_backlog);
    std::uniform_int_distribution<int> ch(0, static_cast<int>(cfg.raw().channel_states.size()) - 1);
    std::vector<std::int64_t> q(cfg.num_mds()), k(cfg.num_links()), local(cfg.num_mds());
    std::vector<int> channel(cfg.num_links());
    for (auto& v : q) v = len(rng);
    for (auto& v : k) v = len(rng);
    for (auto& v : channel) v = ch(rng);
    if (cfg.raw().local_compute) {
        for (auto& v : local) v = len(rng);
    }
    SystemState s = SystemState::with_backlog(cfg, q, k, channel, local);
    s.slot = static_cast<std::int64_t>(rng() % 100000);
    return s;
}

} // namespace edgebench::test_util
