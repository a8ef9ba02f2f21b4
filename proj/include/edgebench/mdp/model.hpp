#pragma once

#include <edgebench/core/action.hpp>
#include <edgebench/core/config.hpp>
#include <edgebench/mdp/finite_mdp.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace edgebench::mdp {

/// A scenario small enough to solve exactly, plus truncation and solver
/// parameters. The scenario must use Bernoulli arrivals and have no
/// deadline, local computing or backhaul links.
class MdpSpec {
public:
    /// Throws MalformedConfig when the scenario or parameters are unsuitable.
    MdpSpec(ValidatedConfig base, MdpParams params);

    const ValidatedConfig& base() const noexcept { return base_; }
    const MdpParams& params() const noexcept { return params_; }
    std::uint64_t hash() const noexcept { return hash_; }

private:
    ValidatedConfig base_;
    MdpParams params_;
    std::uint64_t hash_;
};

std::uint64_t mdp_spec_hash(std::uint64_t config_hash, const MdpParams& params);

/// Mixed-radix indexing of (Q per MD, K per link, channel per link), least
/// significant digit first: Q_0 ... Q_{U-1}, K links, channel links.
/// Index 0 is the all-empty state with every channel at state 0.
class StateSpace {
public:
    StateSpace(int num_mds, int num_ess, int q_max, int k_max, int channel_states, double cap);

    /// Product of radices, evaluated in floating point so overflow cannot hide
    /// a cap violation.
    static double count(int num_mds, int num_ess, int q_max, int k_max, int channel_states);

    std::size_t size() const noexcept { return size_; }
    int num_mds() const noexcept { return num_mds_; }
    int num_links() const noexcept { return num_mds_ * num_ess_; }
    int q_max() const noexcept { return q_max_; }
    int k_max() const noexcept { return k_max_; }
    int channel_states() const noexcept { return channels_; }

    struct Point {
        std::vector<int> q;
        std::vector<int> k;
        std::vector<int> channel;
    };

    std::size_t encode(std::span<const int> q, std::span<const int> k,
                       std::span<const int> channel) const;
    Point decode(std::size_t index) const;

    /// Index of the channel digits alone, in [0, channels^links).
    std::size_t channel_index(std::span<const int> channel) const;

private:
    int num_mds_;
    int num_ess_;
    int q_max_;
    int k_max_;
    int channels_;
    std::size_t size_;
};

/// Joint actions: per MD either idle or (ES, positive power); per ES a core
/// split over MDs with at most M_j cores in total. Action 0 is all-idle.
class ActionSpace {
public:
    ActionSpace(const ValidatedConfig& cfg, double cap);

    static double count(const ValidatedConfig& cfg);

    std::size_t size() const noexcept { return size_; }
    Action decode(std::size_t index) const;

private:
    int num_mds_;
    int num_ess_;
    std::vector<double> power_levels_;
    int md_options_;
    // Per ES: every core split, all-zero first.
    std::vector<std::vector<std::vector<int>>> splits_;
    std::size_t size_;
};

/// The exact kernel of the truncated dynamics. Within a slot: serve
/// min(K, c), draw the next channel, uplink min(Q, r) with K clipped at
/// k_max, then add Bernoulli arrivals with Q clipped at q_max. Clipped tasks
/// are drops and earn no reward.
class TransitionModel {
public:
    explicit TransitionModel(const MdpSpec& spec);

    const MdpSpec& spec() const noexcept { return *spec_; }
    const StateSpace& states() const noexcept { return states_; }
    const ActionSpace& actions() const noexcept { return actions_; }
    const FiniteMdp& kernel() const noexcept { return kernel_; }
    double expected_overflow(std::size_t s, std::size_t a) const noexcept {
        return overflow_[kernel_.pair(s, a)];
    }

private:
    const MdpSpec* spec_;
    StateSpace states_;
    ActionSpace actions_;
    FiniteMdp kernel_;
    std::vector<double> overflow_;
};

/// Throws StateSpaceTooLarge when the state count exceeds params.state_cap.
StateSpace enumerate_states(const MdpSpec& spec);

/// The returned model refers to `spec`, which must outlive it.
TransitionModel build_transition_model(const MdpSpec& spec);

} // namespace edgebench::mdp
