#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edgebench::mdp {

struct Transition {
    std::uint32_t next = 0;
    double prob = 0.0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Explicit finite MDP in compressed-row form: row (s, a) lists its
/// successors sorted by state index with duplicates merged.
struct FiniteMdp {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<std::uint64_t> row_ptr;  // num_states * num_actions + 1 entries
    std::vector<Transition> transitions;
    std::vector<double> reward;  // per (s, a)

    std::size_t pair(std::size_t s, std::size_t a) const noexcept { return s * num_actions + a; }

    std::span<const Transition> row(std::size_t s, std::size_t a) const noexcept {
        const std::size_t p = pair(s, a);
        return {transitions.data() + row_ptr[p], transitions.data() + row_ptr[p + 1]};
    }
    double r(std::size_t s, std::size_t a) const noexcept { return reward[pair(s, a)]; }

    /// Appends a row; rows must be added in (s, a) order.
    void push_row(std::span<const Transition> successors, double reward_value);
};

struct ValueIterationResult {
    std::vector<std::uint32_t> policy;  // greedy action per state
    std::vector<double> value;
    std::int64_t iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

/// Jacobi value iteration from V = 0 until the sup-norm change is at most
/// `epsilon`, then greedy extraction with ties to the lowest action index.
/// Throws NonConvergence past `iteration_cap` sweeps.
ValueIterationResult value_iteration(const FiniteMdp& mdp, double gamma, double epsilon,
                                     std::int64_t iteration_cap = 1'000'000);

/// Discounted value of a stationary deterministic policy by successive
/// approximation to a sup-norm change below `tolerance`.
std::vector<double> evaluate_policy(const FiniteMdp& mdp, std::span<const std::uint32_t> policy,
                                    double gamma, double tolerance = 1e-12);

/// Long-run average reward of a policy started in `start`, from the
/// limiting distribution of the lazy chain (P + I) / 2.
double average_reward(const FiniteMdp& mdp, std::span<const std::uint32_t> policy,
                      std::size_t start = 0);

struct OracleResult {
    std::vector<double> value;
    std::vector<std::uint32_t> policy;
    // Number of behaviourally distinct policies enumerated.
    double candidates = 0.0;
};

/// Exhaustive search over stationary deterministic policies, each evaluated
/// by a dense linear solve of (I - gamma P) v = r. Actions with identical
/// reward and successor rows in a state are enumerated once. Throws
/// OracleTooLarge unless the candidate count is at most 1e7, or every
/// state has at most 4 distinct actions and there are at most 12 states.
OracleResult brute_force_best_policy(const FiniteMdp& mdp, double gamma);

} // namespace edgebench::mdp
