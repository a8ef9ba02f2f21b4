#pragma once

#include <edgebench/core/action.hpp>
#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>
#include <edgebench/dynamics/dynamics.hpp>
#include <edgebench/mdp/solved_policy.hpp>
#include <edgebench/metrics/summary.hpp>

#include <functional>
#include <memory>

namespace edgebench::experiment {

using DecideFn = std::function<Action(const SystemState&)>;

/// Decision function for cfg.raw().policy. Random choices use `seed`. When
/// the scenario has backhaul links, planned migrations are appended to every
/// action. Solved loads policy_file; Mdp solves the truncated model of `cfg`
/// unless `solved` already holds it.
DecideFn make_policy(const ValidatedConfig& cfg, std::uint64_t seed,
                     std::shared_ptr<const mdp::DeployedPolicy> solved = nullptr);

/// Solves the truncated model of `cfg` with cfg.raw().policy.mdp.
std::shared_ptr<const mdp::DeployedPolicy> solve_for(const ValidatedConfig& cfg);

struct RunResult {
    metrics::RunSummary summary;
    SystemState final_state;
};

using Observer = std::function<void(const dynamics::SlotRecord&)>;

/// Runs cfg.raw().horizon slots from the empty state with seed
/// cfg.raw().rng_seed.
RunResult run_trajectory(const ValidatedConfig& cfg, const DecideFn& decide,
                         metrics::RunLabel label, const Observer& observer = {});

metrics::RunLabel label_for(const ValidatedConfig& cfg, double lambda_multiplier = 1.0);

/// make_policy + run_trajectory with the default label.
RunResult run_scenario(const ValidatedConfig& cfg, const Observer& observer = {});

} // namespace edgebench::experiment
