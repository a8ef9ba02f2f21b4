#include <edgebench/experiment/runner.hpp>

#include <edgebench/multihop/migration.hpp>
#include <edgebench/policies/policies.hpp>

namespace edgebench::experiment {

std::shared_ptr<const mdp::DeployedPolicy> solve_for(const ValidatedConfig& cfg) {
    const mdp::MdpSpec spec(cfg, cfg.raw().policy.mdp);
    return std::make_shared<const mdp::DeployedPolicy>(mdp::solve(spec), cfg);
}

DecideFn make_policy(const ValidatedConfig& cfg, std::uint64_t seed,
                     std::shared_ptr<const mdp::DeployedPolicy> solved) {
    const PolicySpec& spec = cfg.raw().policy;
    const ValidatedConfig* c = &cfg;
    DecideFn base;
    switch (spec.kind) {
    case PolicyKind::TransmissionBased:
        base = [c](const SystemState& s) { return policies::decide_transmission_based(s, *c); };
        break;
    case PolicyKind::ComputationBased:
        base = [c](const SystemState& s) { return policies::decide_computation_based(s, *c); };
        break;
    case PolicyKind::Backpressure:
        base = [c, V = spec.V](const SystemState& s) {
            return policies::decide_backpressure(s, *c, V);
        };
        break;
    case PolicyKind::RandomFeasible:
        base = [c, seed](const SystemState& s) {
            return policies::decide_random_feasible(s, *c, seed);
        };
        break;
    case PolicyKind::LocalOffloadThreshold:
        if (!cfg.raw().local_compute) throw LocalComputeDisabled();
        base = [c, theta = spec.theta, V = spec.V](const SystemState& s) {
            return policies::decide_local_offload_threshold(s, *c, theta, V);
        };
        break;
    case PolicyKind::Solved:
        if (!solved) {
            solved = std::make_shared<const mdp::DeployedPolicy>(
                mdp::load_solved_policy(spec.policy_file), cfg);
        }
        [[fallthrough]];
    case PolicyKind::Mdp:
        if (!solved) solved = solve_for(cfg);
        base = [solved](const SystemState& s) { return solved->decide(s); };
        break;
    }

    if (cfg.raw().backhaul_links.empty()) {
        return base;
    }
    return [c, base = std::move(base), delta = spec.migration_threshold](const SystemState& s) {
        Action a = base(s);
        auto moves = multihop::plan_migrations(s, *c, delta);
        a.migrate.insert(a.migrate.end(), moves.begin(), moves.end());
        return a;
    };
}

RunResult run_trajectory(const ValidatedConfig& cfg, const DecideFn& decide,
                         metrics::RunLabel label, const Observer& observer) {
    SystemState state(cfg);
    metrics::SummaryAccumulator acc(cfg);
    const std::uint64_t seed = cfg.raw().rng_seed;
    for (std::int64_t t = 0; t < cfg.raw().horizon; ++t) {
        const auto rec = dynamics::step(state, decide(state), cfg, seed);
        acc.add(rec);
        if (observer) observer(rec);
    }
    auto summary = metrics::summarize(acc, state, cfg, std::move(label));
    return {std::move(summary), std::move(state)};
}

metrics::RunLabel label_for(const ValidatedConfig& cfg, double lambda_multiplier) {
    metrics::RunLabel l;
    l.scenario_id = cfg.raw().scenario_id;
    l.policy = policy_name(cfg.raw().policy.kind);
    l.V = cfg.raw().policy.V;
    l.lambda_multiplier = lambda_multiplier;
    l.seed = cfg.raw().rng_seed;
    l.comparison_hash = cfg.comparison_hash();
    return l;
}

RunResult run_scenario(const ValidatedConfig& cfg, const Observer& observer) {
    return run_trajectory(cfg, make_policy(cfg, cfg.raw().rng_seed), label_for(cfg), observer);
}

} // namespace edgebench::experiment
