#include <edgebench/mdp/finite_mdp.hpp>

#include <edgebench/core/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace edgebench::mdp {

void FiniteMdp::push_row(std::span<const Transition> successors, double reward_value) {
    if (row_ptr.empty()) row_ptr.push_back(0);
    transitions.insert(transitions.end(), successors.begin(), successors.end());
    row_ptr.push_back(transitions.size());
    reward.push_back(reward_value);
}

namespace {

double q_value(const FiniteMdp& mdp, std::size_t s, std::size_t a, std::span<const double> v,
               double gamma) {
    double acc = 0.0;
    for (const auto& t : mdp.row(s, a)) acc += t.prob * v[t.next];
    return mdp.r(s, a) + gamma * acc;
}

} // namespace

ValueIterationResult value_iteration(const FiniteMdp& mdp, double gamma, double epsilon,
                                     std::int64_t iteration_cap) {
    const std::size_t S = mdp.num_states;
    const std::size_t A = mdp.num_actions;
    ValueIterationResult out;
    std::vector<double> v(S, 0.0);
    std::vector<double> next(S, 0.0);

    while (true) {
        if (out.iterations >= iteration_cap) {
            throw NonConvergence("value iteration exceeded " + std::to_string(iteration_cap) +
                                 " sweeps (residual " + std::to_string(out.residual) + ")");
        }
        double residual = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < A; ++a) {
                best = std::max(best, q_value(mdp, s, a, v, gamma));
            }
            next[s] = best;
            residual = std::max(residual, std::abs(best - v[s]));
        }
        v.swap(next);
        ++out.iterations;
        out.residual = residual;
        out.residual_history.push_back(residual);
        if (residual <= epsilon) break;
    }

    out.policy.assign(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < A; ++a) {
            const double q = q_value(mdp, s, a, v, gamma);
            if (q > best) {
                best = q;
                out.policy[s] = static_cast<std::uint32_t>(a);
            }
        }
    }
    out.value = std::move(v);
    return out;
}

std::vector<double> evaluate_policy(const FiniteMdp& mdp, std::span<const std::uint32_t> policy,
                                    double gamma, double tolerance) {
    const std::size_t S = mdp.num_states;
    std::vector<double> v(S, 0.0);
    std::vector<double> next(S, 0.0);
    // Stop on the a-posteriori bound gamma/(1-gamma) * change.
    const double stop = tolerance * (1.0 - gamma) / gamma;
    for (int sweep = 0; sweep < 10'000'000; ++sweep) {
        double change = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            next[s] = q_value(mdp, s, policy[s], v, gamma);
            change = std::max(change, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        if (change <= stop) break;
    }
    return v;
}

double average_reward(const FiniteMdp& mdp, std::span<const std::uint32_t> policy,
                      std::size_t start) {
    const std::size_t S = mdp.num_states;
    std::vector<double> dist(S, 0.0);
    std::vector<double> next(S, 0.0);
    dist[start] = 1.0;
    for (int it = 0; it < 1'000'000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            if (dist[s] == 0.0) continue;
            next[s] += 0.5 * dist[s];
            for (const auto& t : mdp.row(s, policy[s])) next[t.next] += 0.5 * dist[s] * t.prob;
        }
        double change = 0.0;
        for (std::size_t s = 0; s < S; ++s) change += std::abs(next[s] - dist[s]);
        dist.swap(next);
        if (change < 1e-13) break;
    }
    double g = 0.0;
    for (std::size_t s = 0; s < S; ++s) g += dist[s] * mdp.r(s, policy[s]);
    return g;
}

OracleResult brute_force_best_policy(const FiniteMdp& mdp, double gamma) {
    const std::size_t S = mdp.num_states;
    const std::size_t A = mdp.num_actions;

    // Behaviourally distinct actions per state.
    std::vector<std::vector<std::uint32_t>> choices(S);
    double candidates = 1.0;
    std::size_t widest = 0;
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const auto row = mdp.row(s, a);
            const bool duplicate = std::any_of(choices[s].begin(), choices[s].end(), [&](auto b) {
                const auto other = mdp.row(s, b);
                return mdp.r(s, a) == mdp.r(s, b) &&
                       std::equal(row.begin(), row.end(), other.begin(), other.end());
            });
            if (!duplicate) choices[s].push_back(static_cast<std::uint32_t>(a));
        }
        candidates *= static_cast<double>(choices[s].size());
        widest = std::max(widest, choices[s].size());
    }
    const bool small = candidates <= 1e7 || (widest <= 4 && S <= 12);
    if (!small) {
        throw OracleTooLarge("brute-force oracle would enumerate " + std::to_string(candidates) +
                             " policies over " + std::to_string(S) + " states");
    }

    OracleResult best;
    best.candidates = candidates;
    double best_score = -std::numeric_limits<double>::infinity();

    std::vector<std::size_t> digit(S, 0);
    std::vector<std::uint32_t> policy(S);
    Eigen::MatrixXd m(S, S);
    Eigen::VectorXd r(S);
    while (true) {
        m.setIdentity();
        for (std::size_t s = 0; s < S; ++s) {
            policy[s] = choices[s][digit[s]];
            r(static_cast<Eigen::Index>(s)) = mdp.r(s, policy[s]);
            for (const auto& t : mdp.row(s, policy[s])) {
                m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t.next)) -=
                    gamma * t.prob;
            }
        }
        const Eigen::VectorXd v = m.partialPivLu().solve(r);
        const double score = v.sum();
        if (score > best_score) {
            best_score = score;
            best.value.assign(v.data(), v.data() + v.size());
            best.policy = policy;
        }

        std::size_t pos = 0;
        while (pos < S && ++digit[pos] == choices[pos].size()) {
            digit[pos] = 0;
            ++pos;
        }
        if (pos == S) break;
    }
    return best;
}

} // namespace edgebench::mdp
