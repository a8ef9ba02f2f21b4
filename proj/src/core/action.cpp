#include <edgebench/core/action.hpp>

#include <algorithm>
#include <map>
#include <utility>

namespace edgebench {

Action Action::idle(int num_mds, int num_ess) {
    Action a;
    a.power.assign(num_mds, 0.0);
    a.assoc.assign(num_mds, kUnassociated);
    a.cores.assign(static_cast<std::size_t>(num_mds) * num_ess, 0);
    a.local_admit.assign(num_mds, 0);
    return a;
}

namespace {

// Index of the backhaul link joining two ESs, or -1.
int find_link(const ScenarioConfig& cfg, int a, int b) {
    for (std::size_t l = 0; l < cfg.backhaul_links.size(); ++l) {
        const auto& link = cfg.backhaul_links[l];
        if ((link.es_a == a && link.es_b == b) || (link.es_a == b && link.es_b == a)) {
            return static_cast<int>(l);
        }
    }
    return -1;
}

} // namespace

std::string action_violation(const Action& a, const SystemState& state,
                             const ValidatedConfig& cfg) {
    const int U = cfg.num_mds();
    const int J = cfg.num_ess();
    const auto& raw = cfg.raw();

    if (a.power.size() != static_cast<std::size_t>(U) || a.assoc.size() != a.power.size() ||
        a.local_admit.size() != a.power.size() || a.cores.size() != cfg.num_links()) {
        return "action dimensions do not match the scenario";
    }
    for (int i = 0; i < U; ++i) {
        const double p = a.power[i];
        if (std::find(raw.power_levels.begin(), raw.power_levels.end(), p) ==
            raw.power_levels.end()) {
            return "MD " + std::to_string(i) + " power is not a configured level";
        }
        if (a.assoc[i] != kUnassociated && (a.assoc[i] < 0 || a.assoc[i] >= J)) {
            return "MD " + std::to_string(i) + " associated to unknown ES";
        }
        if (p > 0.0 && a.assoc[i] == kUnassociated) {
            return "MD " + std::to_string(i) + " transmits without association";
        }
        if (a.local_admit[i] < 0) {
            return "MD " + std::to_string(i) + " has negative local admission";
        }
        if (a.local_admit[i] > 0 && !raw.local_compute) {
            return "local admission without local computing";
        }
    }
    for (int j = 0; j < J; ++j) {
        std::int64_t used = 0;
        for (int i = 0; i < U; ++i) {
            const int c = a.cores[cfg.link(i, j)];
            if (c < 0) {
                return "negative core allocation";
            }
            used += c;
        }
        if (used > cfg.cores(j)) {
            return "ES " + std::to_string(j) + " allocates " + std::to_string(used) +
                   " cores of " + std::to_string(cfg.cores(j));
        }
    }

    std::map<int, std::int64_t> per_link;
    std::map<int, int> direction;
    std::map<std::pair<int, int>, std::int64_t> taken;
    for (const auto& m : a.migrate) {
        if (m.md < 0 || m.md >= U || m.from_es < 0 || m.from_es >= J || m.to_es < 0 ||
            m.to_es >= J) {
            return "migration references unknown node";
        }
        const int l = find_link(raw, m.from_es, m.to_es);
        if (l < 0) {
            return "migration over a missing backhaul link";
        }
        if (m.count < 0) {
            return "negative migration count";
        }
        auto [it, fresh] = direction.emplace(l, m.from_es);
        if (!fresh && it->second != m.from_es) {
            return "migration in both directions on one link";
        }
        per_link[l] += m.count;
        if (per_link[l] > raw.backhaul_links[l].capacity_tasks_per_slot) {
            return "migration exceeds link capacity";
        }
        auto& moved = taken[{m.md, m.from_es}];
        moved += m.count;
        if (moved > state.k(m.md, m.from_es)) {
            return "migration exceeds computing backlog";
        }
    }
    return {};
}

void require_valid_action(const Action& action, const SystemState& state,
                          const ValidatedConfig& cfg) {
    if (auto why = action_violation(action, state, cfg); !why.empty()) {
        throw ActionInvalid(state.slot, why);
    }
}

} // namespace edgebench
