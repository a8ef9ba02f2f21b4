#include <edgebench/policies/policies.hpp>

#include <edgebench/core/rng.hpp>
#include <edgebench/dynamics/dynamics.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace edgebench::policies {

namespace {

// MD indices with K_ij > 0 at `es`, largest backlog first.
std::vector<int> backlogged_by_size(const SystemState& state, int es) {
    std::vector<int> order;
    for (int i = 0; i < state.num_mds(); ++i) {
        if (state.k(i, es) > 0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return state.k(a, es) > state.k(b, es); });
    return order;
}

int num_positive_powers(const ValidatedConfig& cfg) {
    return static_cast<int>(cfg.raw().power_levels.size()) - 1;
}

void send_at_max_power(Action& a, const ValidatedConfig& cfg, int md, int es) {
    if (num_positive_powers(cfg) == 0) {
        return;
    }
    a.assoc[md] = es;
    a.power[md] = cfg.max_power();
}

} // namespace

void split_cores_evenly(const SystemState& state, const ValidatedConfig& cfg, Action& a) {
    for (int j = 0; j < cfg.num_ess(); ++j) {
        const auto order = backlogged_by_size(state, j);
        if (order.empty()) continue;
        const int n = static_cast<int>(order.size());
        const int base = cfg.cores(j) / n;
        const int extra = cfg.cores(j) % n;
        for (int r = 0; r < n; ++r) {
            a.cores[cfg.link(order[r], j)] = base + (r < extra ? 1 : 0);
        }
    }
}

void assign_cores_largest_first(const SystemState& state, const ValidatedConfig& cfg,
                                Action& a) {
    const std::int64_t per_core = cfg.per_core_rate();
    for (int j = 0; j < cfg.num_ess(); ++j) {
        int left = cfg.cores(j);
        for (int i : backlogged_by_size(state, j)) {
            if (left == 0) break;
            const std::int64_t want =
                per_core > 0 ? (state.k(i, j) + per_core - 1) / per_core : left;
            const int give = static_cast<int>(std::min<std::int64_t>(want, left));
            a.cores[cfg.link(i, j)] = give;
            left -= give;
        }
    }
}

void assign_cores_greedy(const SystemState& state, const ValidatedConfig& cfg, Action& a) {
    const std::int64_t per_core = std::max<std::int64_t>(cfg.per_core_rate(), 1);
    const int U = cfg.num_mds();
    for (int j = 0; j < cfg.num_ess(); ++j) {
        std::vector<std::int64_t> remaining(U);
        for (int i = 0; i < U; ++i) remaining[i] = state.k(i, j);
        for (int core = 0; core < cfg.cores(j); ++core) {
            int best = -1;
            for (int i = 0; i < U; ++i) {
                if (remaining[i] > 0 && (best < 0 || remaining[i] > remaining[best])) best = i;
            }
            if (best < 0) break;
            ++a.cores[cfg.link(best, j)];
            remaining[best] -= per_core;
        }
    }
}

Action decide_transmission_based(const SystemState& state, const ValidatedConfig& cfg) {
    Action a = Action::idle(cfg.num_mds(), cfg.num_ess());
    const auto& fading = cfg.raw().channel_states;
    for (int i = 0; i < cfg.num_mds(); ++i) {
        if (state.q(i) == 0) continue;
        int best = 0;
        double best_gain = -1.0;
        for (int j = 0; j < cfg.num_ess(); ++j) {
            const double g = cfg.gain(i, j) * fading[state.channel(i, j)];
            if (g > best_gain) {
                best_gain = g;
                best = j;
            }
        }
        send_at_max_power(a, cfg, i, best);
    }
    split_cores_evenly(state, cfg, a);
    return a;
}

Action decide_computation_based(const SystemState& state, const ValidatedConfig& cfg) {
    Action a = Action::idle(cfg.num_mds(), cfg.num_ess());
    int target = 0;
    for (int j = 1; j < cfg.num_ess(); ++j) {
        if (state.es_backlog(j) < state.es_backlog(target)) target = j;
    }
    for (int i = 0; i < cfg.num_mds(); ++i) {
        if (state.q(i) > 0) send_at_max_power(a, cfg, i, target);
    }
    assign_cores_largest_first(state, cfg, a);
    return a;
}

double backpressure_weight(std::int64_t q, std::int64_t k, std::int64_t rate, double V,
                           double power, double slot_duration) {
    const auto diff = static_cast<double>(std::max<std::int64_t>(q - k, 0));
    return diff * static_cast<double>(rate) - V * power * slot_duration;
}

WeightChoice argmax_weight(std::span<const double> weights, int num_ess, int num_power) {
    WeightChoice best;
    for (int j = 0; j < num_ess; ++j) {
        for (int p = 0; p < num_power; ++p) {
            const double w = weights[static_cast<std::size_t>(j) * num_power + p];
            if (w > best.weight) {
                best.es = j;
                best.power_index = p;
                best.weight = w;
            }
        }
    }
    return best;
}

Action decide_backpressure(const SystemState& state, const ValidatedConfig& cfg, double V) {
    const int U = cfg.num_mds();
    const int J = cfg.num_ess();
    const int P = num_positive_powers(cfg);
    const auto& levels = cfg.raw().power_levels;
    const double tau = cfg.raw().slot_duration;

    Action a = Action::idle(U, J);
    std::vector<double> weights(static_cast<std::size_t>(J) * P);

    auto choose = [&](int i, auto sharers_at) {
        for (int j = 0; j < J; ++j) {
            for (int p = 0; p < P; ++p) {
                const double power = levels[p + 1];
                const auto rate =
                    dynamics::link_rate(cfg, i, j, state.channel(i, j), power, sharers_at(j));
                weights[static_cast<std::size_t>(j) * P + p] =
                    backpressure_weight(state.q(i), state.k(i, j), rate, V, power, tau);
            }
        }
        return argmax_weight(weights, J, P);
    };

    // Provisional choices as if each MD had its ES to itself.
    std::vector<int> provisional(U, kUnassociated);
    std::vector<int> load(J, 0);
    for (int i = 0; i < U; ++i) {
        if (state.q(i) == 0) continue;
        const WeightChoice c = choose(i, [](int) { return 1; });
        provisional[i] = c.es;
        if (!c.idle()) ++load[c.es];
    }

    // One refinement under the sharing the provisional choices induce.
    for (int i = 0; i < U; ++i) {
        if (state.q(i) == 0) continue;
        const WeightChoice c =
            choose(i, [&](int j) { return load[j] + (provisional[i] == j ? 0 : 1); });
        if (!c.idle()) {
            a.assoc[i] = c.es;
            a.power[i] = levels[c.power_index + 1];
        }
    }

    assign_cores_greedy(state, cfg, a);
    return a;
}

Action decide_local_offload_threshold(const SystemState& state, const ValidatedConfig& cfg,
                                      double theta, double V) {
    if (!cfg.raw().local_compute) {
        throw LocalComputeDisabled();
    }
    Action a = decide_backpressure(state, cfg, V);
    for (int i = 0; i < cfg.num_mds(); ++i) {
        if (std::isinf(theta)) {
            a.local_admit[i] = kAdmitAll;
        } else {
            const double room = std::ceil(theta - static_cast<double>(state.local(i)));
            a.local_admit[i] = room > 0.0 ? static_cast<std::int64_t>(room) : 0;
        }
    }
    return a;
}

Action decide_random_feasible(const SystemState& state, const ValidatedConfig& cfg,
                              std::uint64_t seed) {
    const int J = cfg.num_ess();
    const int P = num_positive_powers(cfg);
    Action a = Action::idle(cfg.num_mds(), J);
    if (P > 0) {
        const auto options = static_cast<std::uint64_t>(J) * static_cast<std::uint64_t>(P);
        for (int i = 0; i < cfg.num_mds(); ++i) {
            if (state.q(i) == 0) continue;
            StreamRng rng(seed, StreamPurpose::Policy, static_cast<std::uint64_t>(state.slot),
                          static_cast<std::uint64_t>(i));
            const auto pick = rng.below(options);
            a.assoc[i] = static_cast<int>(pick / P);
            a.power[i] = cfg.raw().power_levels[pick % P + 1];
        }
    }
    split_cores_evenly(state, cfg, a);
    return a;
}

} // namespace edgebench::policies
