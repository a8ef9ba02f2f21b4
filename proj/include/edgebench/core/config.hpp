#pragma once

#include <edgebench/core/errors.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgebench {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

enum class ArrivalKind { Bernoulli, Poisson };

enum class PlacementKind { Explicit, Grid, Uniform };

/// Either explicit coordinates or a directive resolved by place_nodes().
struct Placement {
    PlacementKind kind = PlacementKind::Grid;
    std::vector<Point> points;
    // Uniform placement seed; the scenario rng_seed is used when unset.
    std::optional<std::uint64_t> seed;

    static Placement grid() { return {PlacementKind::Grid, {}, std::nullopt}; }
    static Placement uniform(std::optional<std::uint64_t> seed = std::nullopt) {
        return {PlacementKind::Uniform, {}, seed};
    }
    static Placement explicit_points(std::vector<Point> pts) {
        return {PlacementKind::Explicit, std::move(pts), std::nullopt};
    }
};

struct LocalCompute {
    double local_core_speed_hz = 1e9;
    // Effective switched capacitance: dynamic power is coeff * f^3 watts.
    double local_energy_coeff = 1e-27;
};

struct BackhaulLink {
    int es_a = 0;
    int es_b = 1;
    int delay_slots = 0;
    std::int64_t capacity_tasks_per_slot = 1;
};

enum class PolicyKind {
    TransmissionBased,
    ComputationBased,
    Backpressure,
    RandomFeasible,
    LocalOffloadThreshold,
    // Loads a SolvedPolicy file.
    Solved,
    // Solves the truncated MDP in-process before the run.
    Mdp,
};

enum class RewardKind { Completions, AdmittedThroughput };

struct MdpParams {
    int q_max = 2;
    int k_max = 2;
    double gamma = 0.95;
    double epsilon = 1e-9;
    RewardKind reward_kind = RewardKind::Completions;
    double state_cap = 2e6;
    double action_cap = 1e4;
    std::int64_t iteration_cap = 1'000'000;
};

inline constexpr double kInfiniteThreshold = std::numeric_limits<double>::infinity();

struct PolicySpec {
    PolicyKind kind = PolicyKind::Backpressure;
    // Drift-plus-penalty weight on transmit energy.
    double V = 0.0;
    // Local-queue admission threshold; kInfiniteThreshold keeps everything local.
    double theta = 0.0;
    // Backlog difference a backhaul link must exceed before migrating.
    double migration_threshold = 0.0;
    std::string policy_file;
    MdpParams mdp;
};

/// Truncation caps; 0 leaves a queue unbounded. Tasks that would exceed a
/// cap are dropped with reason Overflow.
struct QueueCaps {
    std::int64_t q_max = 0;
    std::int64_t k_max = 0;
};

struct ScenarioConfig {
    std::string scenario_id = "scenario";
    int num_mds = 1;
    int num_ess = 1;
    std::int64_t horizon = 1000;
    double slot_duration = 0.1;
    double area_side = 100.0;
    Placement es_positions = Placement::grid();
    Placement md_positions = Placement::uniform();

    double task_size_bits = 1e6;
    double task_cycles = 1e8;
    std::int64_t deadline_slots = 0;

    std::vector<double> arrival_rates;
    ArrivalKind arrival_kind = ArrivalKind::Bernoulli;

    std::vector<double> power_levels{0.0, 0.1};
    double bandwidth_hz = 1e7;
    double noise_psd = 4e-21;
    double pathloss_exponent = 3.0;
    double reference_gain = 1e-3;
    double reference_distance = 1.0;
    std::vector<double> channel_states{0.5, 1.5};
    std::vector<std::vector<double>> channel_transition{{0.9, 0.1}, {0.1, 0.9}};

    std::vector<int> cores_per_es;
    double core_speed_hz = 2e9;
    std::optional<LocalCompute> local_compute;
    std::vector<BackhaulLink> backhaul_links;
    QueueCaps queue_caps;

    PolicySpec policy;
    std::uint64_t rng_seed = 1;
};

/// Reference gain scaled by the log-distance law, clamped below the
/// reference distance.
double mean_gain(double distance_m, const ScenarioConfig& cfg);

struct Placements {
    std::vector<Point> es;
    std::vector<Point> md;
};

Placements place_nodes(const ScenarioConfig& cfg);

/// A checked scenario with its derived constants. Immutable once built.
class ValidatedConfig {
public:
    const ScenarioConfig& raw() const noexcept { return cfg_; }

    int num_mds() const noexcept { return cfg_.num_mds; }
    int num_ess() const noexcept { return cfg_.num_ess; }
    std::size_t num_links() const noexcept {
        return static_cast<std::size_t>(cfg_.num_mds) * cfg_.num_ess;
    }
    std::size_t link(int md, int es) const noexcept {
        return static_cast<std::size_t>(md) * cfg_.num_ess + es;
    }

    std::span<const Point> es_positions() const noexcept { return es_pos_; }
    std::span<const Point> md_positions() const noexcept { return md_pos_; }

    /// Path-loss gain between MD and ES, before fading.
    double gain(int md, int es) const noexcept { return gains_[link(md, es)]; }

    /// Tasks one core at `es` completes in a slot.
    std::int64_t per_core_rate() const noexcept { return per_core_rate_; }
    std::int64_t local_rate() const noexcept { return local_rate_; }
    double core_cycles_per_slot() const noexcept {
        return cfg_.core_speed_hz * cfg_.slot_duration;
    }
    int cores(int es) const noexcept { return cfg_.cores_per_es[es]; }
    double max_power() const noexcept { return cfg_.power_levels.back(); }

    /// Hash of everything that shapes the dynamics (resolved positions
    /// included), excluding horizon, seed, policy and id.
    std::uint64_t structural_hash() const noexcept { return structural_hash_; }

    /// structural_hash() without the queue caps: identifies the model a
    /// solved policy was computed for.
    std::uint64_t model_hash() const noexcept { return model_hash_; }

    /// Hash used to decide whether runs are comparable: like
    /// structural_hash() but over unresolved placement directives and with
    /// arrival rates removed.
    std::uint64_t comparison_hash() const noexcept { return comparison_hash_; }

private:
    friend ValidatedConfig validate_config(ScenarioConfig cfg);

    ValidatedConfig() = default;

    ScenarioConfig cfg_;
    std::vector<Point> es_pos_;
    std::vector<Point> md_pos_;
    std::vector<double> gains_;
    std::int64_t per_core_rate_ = 0;
    std::int64_t local_rate_ = 0;
    std::uint64_t structural_hash_ = 0;
    std::uint64_t model_hash_ = 0;
    std::uint64_t comparison_hash_ = 0;
};

/// Throws MalformedConfig or InconsistentDimensions.
ValidatedConfig validate_config(ScenarioConfig cfg);

std::string policy_name(PolicyKind kind);
PolicyKind parse_policy_name(const std::string& name);

} // namespace edgebench
