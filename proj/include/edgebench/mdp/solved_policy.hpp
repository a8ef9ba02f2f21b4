#pragma once

#include <edgebench/core/action.hpp>
#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>
#include <edgebench/mdp/model.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace edgebench::mdp {

/// Greedy state -> action table from value iteration, with enough metadata
/// to refuse deployment on a different model.
struct SolvedPolicy {
    std::uint64_t spec_hash = 0;
    std::uint64_t config_hash = 0;  // ValidatedConfig::model_hash() of the base
    MdpParams params;
    int num_mds = 0;
    int num_ess = 0;
    int channel_states = 0;
    std::vector<std::uint32_t> actions;  // per state index
    std::vector<double> value;
    std::int64_t iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

SolvedPolicy solve(const MdpSpec& spec, const TransitionModel& model);

/// Builds the model and solves it. Throws StateSpaceTooLarge or
/// NonConvergence.
SolvedPolicy solve(const MdpSpec& spec);

void save_solved_policy(const SolvedPolicy& policy, const std::filesystem::path& path);

/// Throws FileNotFound, MalformedConfig for a damaged file, or SpecMismatch
/// when the embedded spec hash does not match the stored parameters.
SolvedPolicy load_solved_policy(const std::filesystem::path& path);

/// A solved policy bound to a scenario for lookups during simulation.
class DeployedPolicy {
public:
    /// Throws SpecMismatch unless `cfg` describes the model the policy was
    /// solved for.
    DeployedPolicy(SolvedPolicy policy, const ValidatedConfig& cfg);

    /// Queue lengths above the truncation caps are clamped before lookup.
    Action decide(const SystemState& state) const;
    std::size_t state_index(const SystemState& state) const;

    const SolvedPolicy& policy() const noexcept { return policy_; }

private:
    SolvedPolicy policy_;
    StateSpace states_;
    ActionSpace actions_;
};

/// One-shot lookup; see DeployedPolicy.
Action solved_policy_decide(const SystemState& state, const SolvedPolicy& policy,
                            const ValidatedConfig& cfg);

} // namespace edgebench::mdp
