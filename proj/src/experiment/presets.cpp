#include <edgebench/experiment/presets.hpp>

#include <numeric>

namespace edgebench::experiment {

namespace {

std::vector<std::uint64_t> seeds(std::uint64_t n) {
    std::vector<std::uint64_t> out(n);
    std::iota(out.begin(), out.end(), std::uint64_t{1});
    return out;
}

PolicySpec policy(PolicyKind kind) {
    PolicySpec p;
    p.kind = kind;
    return p;
}

SweepSpec case_study() {
    SweepSpec s;
    ScenarioConfig& c = s.base;
    c.scenario_id = "case-study";
    c.num_mds = 40;
    c.num_ess = 4;
    c.horizon = 2000;
    c.area_side = 100.0;
    c.es_positions = Placement::grid();
    c.md_positions = Placement::uniform();
    c.arrival_rates.assign(40, 0.1);
    c.task_size_bits = 2e5;
    c.power_levels = {0.0, 0.05, 0.1};
    c.cores_per_es = {4, 4, 4, 4};
    s.lambda_multipliers = {2, 4, 6, 8, 9, 10};
    s.policies = {policy(PolicyKind::Backpressure), policy(PolicyKind::TransmissionBased),
                  policy(PolicyKind::ComputationBased)};
    s.seeds = seeds(20);
    return s;
}

SweepSpec case_study_small() {
    SweepSpec s;
    ScenarioConfig& c = s.base;
    c.scenario_id = "case-study-small";
    c.num_mds = 2;
    c.num_ess = 2;
    c.horizon = 20000;
    c.area_side = 100.0;
    c.es_positions = Placement::explicit_points({{30.0, 50.0}, {70.0, 50.0}});
    c.md_positions = Placement::explicit_points({{20.0, 50.0}, {40.0, 50.0}});
    c.arrival_rates.assign(2, 0.25);
    c.task_size_bits = 1e7;
    c.power_levels = {0.0, 0.1};
    c.channel_states = {1.0};
    c.channel_transition = {{1.0}};
    c.cores_per_es = {1, 1};
    c.core_speed_hz = 1e9;
    c.queue_caps = {3, 3};
    PolicySpec mdp = policy(PolicyKind::Mdp);
    mdp.mdp.q_max = 3;
    mdp.mdp.k_max = 3;
    mdp.mdp.epsilon = 1e-6;
    s.lambda_multipliers = {1, 2, 3, 4};
    s.policies = {mdp, policy(PolicyKind::Backpressure), policy(PolicyKind::TransmissionBased),
                  policy(PolicyKind::ComputationBased)};
    s.seeds = seeds(20);
    return s;
}

} // namespace

std::vector<std::string> preset_names() { return {"case-study", "case-study-small"}; }

SweepSpec preset(const std::string& name) {
    if (name == "case-study") return case_study();
    if (name == "case-study-small") return case_study_small();
    throw MalformedConfig("--preset", "unknown preset '" + name + "'");
}

} // namespace edgebench::experiment
