#include <edgebench/mdp/solved_policy.hpp>

#include <edgebench/core/scenario_io.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace edgebench::mdp {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "edgebench-solved-policy";
constexpr int kVersion = 1;

std::string hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

std::uint64_t parse_hex(const json& j, const std::string& field) {
    if (!j.is_string() || j.get<std::string>().size() != 16) {
        throw MalformedConfig(field, "expected a 16-digit hex hash");
    }
    try {
        return std::stoull(j.get<std::string>(), nullptr, 16);
    } catch (const std::exception&) {
        throw MalformedConfig(field, "expected a 16-digit hex hash");
    }
}

json params_to_json(const MdpParams& p) {
    return {{"q_max", p.q_max},
            {"k_max", p.k_max},
            {"gamma", p.gamma},
            {"epsilon", p.epsilon},
            {"reward_kind", p.reward_kind == RewardKind::Completions ? "completions"
                                                                     : "admitted_throughput"},
            {"state_cap", p.state_cap},
            {"action_cap", p.action_cap},
            {"iteration_cap", p.iteration_cap}};
}

MdpParams params_from_json(const json& j) {
    MdpParams p;
    p.q_max = j.at("q_max").get<int>();
    p.k_max = j.at("k_max").get<int>();
    p.gamma = j.at("gamma").get<double>();
    p.epsilon = j.at("epsilon").get<double>();
    const auto kind = j.at("reward_kind").get<std::string>();
    if (kind == "completions") {
        p.reward_kind = RewardKind::Completions;
    } else if (kind == "admitted_throughput") {
        p.reward_kind = RewardKind::AdmittedThroughput;
    } else {
        throw MalformedConfig("$.params.reward_kind", "unknown reward kind '" + kind + "'");
    }
    p.state_cap = j.at("state_cap").get<double>();
    p.action_cap = j.at("action_cap").get<double>();
    p.iteration_cap = j.at("iteration_cap").get<std::int64_t>();
    return p;
}

SolvedPolicy matching(SolvedPolicy policy, const ValidatedConfig& cfg) {
    if (cfg.model_hash() != policy.config_hash) {
        throw SpecMismatch(fmt::format("policy was solved for config {}, scenario is {}",
                                       hex(policy.config_hash), hex(cfg.model_hash())));
    }
    return policy;
}

} // namespace

SolvedPolicy solve(const MdpSpec& spec, const TransitionModel& model) {
    const auto vi = value_iteration(model.kernel(), spec.params().gamma, spec.params().epsilon,
                                    spec.params().iteration_cap);
    SolvedPolicy out;
    out.spec_hash = spec.hash();
    out.config_hash = spec.base().model_hash();
    out.params = spec.params();
    out.num_mds = spec.base().num_mds();
    out.num_ess = spec.base().num_ess();
    out.channel_states = model.states().channel_states();
    out.actions = vi.policy;
    out.value = vi.value;
    out.iterations = vi.iterations;
    out.residual = vi.residual;
    out.residual_history = vi.residual_history;
    return out;
}

SolvedPolicy solve(const MdpSpec& spec) {
    const TransitionModel model = build_transition_model(spec);
    return solve(spec, model);
}

void save_solved_policy(const SolvedPolicy& policy, const std::filesystem::path& path) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["spec_hash"] = hex(policy.spec_hash);
    j["config_hash"] = hex(policy.config_hash);
    j["params"] = params_to_json(policy.params);
    j["num_mds"] = policy.num_mds;
    j["num_ess"] = policy.num_ess;
    j["channel_states"] = policy.channel_states;
    j["iterations"] = policy.iterations;
    j["residual"] = policy.residual;
    j["residual_history"] = policy.residual_history;
    j["actions"] = policy.actions;
    j["value"] = policy.value;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << j.dump() << '\n';
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

SolvedPolicy load_solved_policy(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    SolvedPolicy p;
    try {
        if (j.at("format") != kFormat || j.at("version") != kVersion) {
            throw MalformedConfig("$.format", "not a solved policy file");
        }
        p.spec_hash = parse_hex(j.at("spec_hash"), "$.spec_hash");
        p.config_hash = parse_hex(j.at("config_hash"), "$.config_hash");
        p.params = params_from_json(j.at("params"));
        p.num_mds = j.at("num_mds").get<int>();
        p.num_ess = j.at("num_ess").get<int>();
        p.channel_states = j.at("channel_states").get<int>();
        p.iterations = j.at("iterations").get<std::int64_t>();
        p.residual = j.at("residual").get<double>();
        p.residual_history = j.at("residual_history").get<std::vector<double>>();
        p.actions = j.at("actions").get<std::vector<std::uint32_t>>();
        p.value = j.at("value").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw MalformedConfig("$", std::string("bad solved policy file: ") + e.what());
    }
    if (mdp_spec_hash(p.config_hash, p.params) != p.spec_hash) {
        throw SpecMismatch(path.string() + ": embedded spec hash does not match its parameters");
    }
    const double states = StateSpace::count(p.num_mds, p.num_ess, p.params.q_max,
                                            p.params.k_max, p.channel_states);
    if (static_cast<double>(p.actions.size()) != states || p.value.size() != p.actions.size()) {
        throw MalformedConfig("$.actions", "table size does not match the state space");
    }
    return p;
}

DeployedPolicy::DeployedPolicy(SolvedPolicy policy, const ValidatedConfig& cfg)
    : policy_(matching(std::move(policy), cfg)),
      states_(policy_.num_mds, policy_.num_ess, policy_.params.q_max, policy_.params.k_max,
              policy_.channel_states, std::max(policy_.params.state_cap, 1.0)),
      actions_(cfg, std::max(policy_.params.action_cap, 1.0)) {
    for (std::size_t s = 0; s < policy_.actions.size(); ++s) {
        if (policy_.actions[s] >= actions_.size()) {
            throw MalformedConfig(fmt::format("$.actions[{}]", s), "action index out of range");
        }
    }
}

std::size_t DeployedPolicy::state_index(const SystemState& state) const {
    const int U = policy_.num_mds;
    const int J = policy_.num_ess;
    std::vector<int> q(U);
    std::vector<int> k(static_cast<std::size_t>(U) * J);
    for (int i = 0; i < U; ++i) {
        q[i] = static_cast<int>(std::min<std::int64_t>(state.q(i), policy_.params.q_max));
        for (int j = 0; j < J; ++j) {
            k[state.link(i, j)] =
                static_cast<int>(std::min<std::int64_t>(state.k(i, j), policy_.params.k_max));
        }
    }
    return states_.encode(q, k, state.channel_idx);
}

Action DeployedPolicy::decide(const SystemState& state) const {
    return actions_.decode(policy_.actions[state_index(state)]);
}

Action solved_policy_decide(const SystemState& state, const SolvedPolicy& policy,
                            const ValidatedConfig& cfg) {
    return DeployedPolicy(policy, cfg).decide(state);
}

} // namespace edgebench::mdp
