#include <edgebench/core/config.hpp>

#include <edgebench/core/rng.hpp>
#include <edgebench/core/scenario_io.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace edgebench {

namespace {

std::string at(const std::string& field, std::size_t i) {
    return field + "[" + std::to_string(i) + "]";
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) {
        throw MalformedConfig("$." + field, what);
    }
}

void require_dims(std::size_t got, std::size_t want, const std::string& field,
                  const std::string& name) {
    if (got != want) {
        throw InconsistentDimensions("$." + field, "expected " + std::to_string(want) +
                                                       " entries (" + name + "), got " +
                                                       std::to_string(got));
    }
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<Point> grid_points(int n, double side) {
    const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12));
    const double cell = side / g;
    std::vector<Point> pts;
    pts.reserve(n);
    for (int idx = 0; idx < n; ++idx) {
        const int col = idx % g;
        const int row = idx / g;
        pts.push_back({(col + 0.5) * cell, (row + 0.5) * cell});
    }
    return pts;
}

std::vector<Point> uniform_points(int n, double side, std::uint64_t seed, std::uint64_t tag) {
    std::vector<Point> pts;
    pts.reserve(n);
    for (int idx = 0; idx < n; ++idx) {
        StreamRng rng(seed, StreamPurpose::Placement, tag, static_cast<std::uint64_t>(idx));
        const double x = rng.uniform() * side;
        const double y = rng.uniform() * side;
        pts.push_back({x, y});
    }
    return pts;
}

std::vector<Point> resolve(const Placement& p, int n, double side, std::uint64_t fallback_seed,
                           std::uint64_t tag) {
    switch (p.kind) {
    case PlacementKind::Explicit:
        return p.points;
    case PlacementKind::Grid:
        return grid_points(n, side);
    case PlacementKind::Uniform:
        return uniform_points(n, side, p.seed.value_or(fallback_seed), tag);
    }
    return {};
}

void validate_placement(const Placement& p, int n, double side, const std::string& field,
                        const std::string& name) {
    if (p.kind != PlacementKind::Explicit) {
        return;
    }
    require_dims(p.points.size(), static_cast<std::size_t>(n), field, name);
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        const Point& pt = p.points[i];
        const bool inside = std::isfinite(pt.x) && std::isfinite(pt.y) && pt.x >= 0.0 &&
                            pt.y >= 0.0 && pt.x <= side && pt.y <= side;
        require(inside, at(field, i), "position lies outside the service area");
    }
}

void validate_fields(const ScenarioConfig& c) {
    require(c.num_mds >= 1, "num_mds", "need at least one mobile device");
    require(c.num_ess >= 1, "num_ess", "need at least one edge server");
    require(c.horizon >= 0, "horizon", "horizon must be non-negative");
    require(finite_pos(c.slot_duration), "slot_duration", "must be positive");
    require(finite_pos(c.area_side), "area_side", "must be positive");
    require(finite_pos(c.task_size_bits), "task_size_bits", "must be positive");
    require(finite_pos(c.task_cycles), "task_cycles", "must be positive");
    require(c.deadline_slots >= 0, "deadline_slots", "must be non-negative");

    const auto U = static_cast<std::size_t>(c.num_mds);
    const auto J = static_cast<std::size_t>(c.num_ess);

    validate_placement(c.es_positions, c.num_ess, c.area_side, "es_positions", "one per ES");
    validate_placement(c.md_positions, c.num_mds, c.area_side, "md_positions", "one per MD");

    require_dims(c.arrival_rates.size(), U, "arrival_rates", "one per MD");
    for (std::size_t i = 0; i < U; ++i) {
        const double rate = c.arrival_rates[i];
        require(finite_nonneg(rate), at("arrival_rates", i), "arrival rate must be >= 0");
        if (c.arrival_kind == ArrivalKind::Bernoulli) {
            require(rate <= 1.0, at("arrival_rates", i),
                    "Bernoulli arrival rate must not exceed 1");
        }
    }

    require(!c.power_levels.empty(), "power_levels", "at least the idle level 0 is required");
    require(c.power_levels.front() == 0.0, at("power_levels", 0), "first power level must be 0");
    for (std::size_t i = 1; i < c.power_levels.size(); ++i) {
        require(std::isfinite(c.power_levels[i]) && c.power_levels[i] > c.power_levels[i - 1],
                at("power_levels", i), "power levels must be strictly ascending");
    }

    require(finite_pos(c.bandwidth_hz), "bandwidth_hz", "must be positive");
    require(finite_pos(c.noise_psd), "noise_psd", "must be positive");
    require(finite_nonneg(c.pathloss_exponent), "pathloss_exponent", "must be >= 0");
    require(finite_pos(c.reference_gain), "reference_gain", "must be positive");
    require(finite_pos(c.reference_distance), "reference_distance", "must be positive");

    require(!c.channel_states.empty(), "channel_states", "need at least one channel state");
    for (std::size_t s = 0; s < c.channel_states.size(); ++s) {
        require(finite_nonneg(c.channel_states[s]), at("channel_states", s),
                "fading multiplier must be >= 0");
    }
    const std::size_t C = c.channel_states.size();
    require_dims(c.channel_transition.size(), C, "channel_transition", "one row per channel state");
    for (std::size_t r = 0; r < C; ++r) {
        const auto& row = c.channel_transition[r];
        require_dims(row.size(), C, at("channel_transition", r), "one column per channel state");
        double sum = 0.0;
        for (std::size_t col = 0; col < C; ++col) {
            require(finite_nonneg(row[col]), at(at("channel_transition", r), col),
                    "transition probability must be >= 0");
            sum += row[col];
        }
        require(std::abs(sum - 1.0) <= 1e-12, at("channel_transition", r),
                "row must sum to 1 (got " + std::to_string(sum) + ")");
    }

    require_dims(c.cores_per_es.size(), J, "cores_per_es", "one per ES");
    for (std::size_t j = 0; j < J; ++j) {
        require(c.cores_per_es[j] >= 0, at("cores_per_es", j), "core count must be >= 0");
    }
    require(finite_pos(c.core_speed_hz), "core_speed_hz", "must be positive");

    if (c.local_compute) {
        require(finite_pos(c.local_compute->local_core_speed_hz),
                "local_compute.local_core_speed_hz", "must be positive");
        require(finite_nonneg(c.local_compute->local_energy_coeff),
                "local_compute.local_energy_coeff", "must be >= 0");
    }

    for (std::size_t l = 0; l < c.backhaul_links.size(); ++l) {
        const auto& link = c.backhaul_links[l];
        const std::string f = at("backhaul_links", l);
        require(link.es_a >= 0 && link.es_a < c.num_ess, f + ".es_a", "unknown edge server");
        require(link.es_b >= 0 && link.es_b < c.num_ess, f + ".es_b", "unknown edge server");
        require(link.es_a != link.es_b, f, "link endpoints must differ");
        require(link.delay_slots >= 0, f + ".delay_slots", "must be >= 0");
        require(link.capacity_tasks_per_slot >= 1, f + ".capacity_tasks_per_slot",
                "must be >= 1");
    }

    require(c.queue_caps.q_max >= 0, "queue_caps.q_max", "must be >= 0");
    require(c.queue_caps.k_max >= 0, "queue_caps.k_max", "must be >= 0");

    const PolicySpec& p = c.policy;
    require(finite_nonneg(p.V), "policy_params.V", "drift-penalty weight must be >= 0");
    require(!std::isnan(p.theta) && p.theta >= 0.0, "policy_params.theta",
            "threshold must be >= 0");
    require(finite_nonneg(p.migration_threshold), "policy_params.migration_threshold",
            "must be >= 0");
    require(p.mdp.q_max >= 0, "policy_params.q_max", "must be >= 0");
    require(p.mdp.k_max >= 0, "policy_params.k_max", "must be >= 0");
    require(p.mdp.gamma > 0.0 && p.mdp.gamma < 1.0, "policy_params.gamma", "must lie in (0, 1)");
    require(finite_pos(p.mdp.epsilon), "policy_params.epsilon", "must be positive");
    if (p.kind == PolicyKind::Solved) {
        require(!p.policy_file.empty(), "policy_params.policy_file",
                "solved policy needs a policy file");
    }
}

std::int64_t tasks_per_slot(double cycles_per_second, double slot, double cycles_per_task) {
    // The epsilon absorbs representation error in products like 1e9 * 0.1.
    return static_cast<std::int64_t>(std::floor(cycles_per_second * slot / cycles_per_task + 1e-9));
}

} // namespace

double mean_gain(double distance_m, const ScenarioConfig& cfg) {
    const double d = std::max(distance_m, cfg.reference_distance);
    return cfg.reference_gain * std::pow(d / cfg.reference_distance, -cfg.pathloss_exponent);
}

Placements place_nodes(const ScenarioConfig& cfg) {
    Placements out;
    out.es = resolve(cfg.es_positions, cfg.num_ess, cfg.area_side, cfg.rng_seed, 1);
    out.md = resolve(cfg.md_positions, cfg.num_mds, cfg.area_side, cfg.rng_seed, 0);
    return out;
}

ValidatedConfig validate_config(ScenarioConfig cfg) {
    validate_fields(cfg);

    ValidatedConfig v;
    Placements placed = place_nodes(cfg);
    v.es_pos_ = std::move(placed.es);
    v.md_pos_ = std::move(placed.md);

    const int U = cfg.num_mds;
    const int J = cfg.num_ess;
    v.gains_.resize(static_cast<std::size_t>(U) * J);
    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < J; ++j) {
            const double dx = v.md_pos_[i].x - v.es_pos_[j].x;
            const double dy = v.md_pos_[i].y - v.es_pos_[j].y;
            v.gains_[static_cast<std::size_t>(i) * J + j] = mean_gain(std::hypot(dx, dy), cfg);
        }
    }
    v.per_core_rate_ = tasks_per_slot(cfg.core_speed_hz, cfg.slot_duration, cfg.task_cycles);
    if (cfg.local_compute) {
        v.local_rate_ = tasks_per_slot(cfg.local_compute->local_core_speed_hz, cfg.slot_duration,
                                       cfg.task_cycles);
    }

    nlohmann::json raw = scenario_to_json(cfg);
    raw.erase("scenario_id");
    raw.erase("rng_seed");
    raw.erase("policy_id");
    raw.erase("policy_params");

    nlohmann::json structural = raw;
    structural.erase("horizon");
    nlohmann::json es_pts = nlohmann::json::array();
    for (const auto& p : v.es_pos_) es_pts.push_back({p.x, p.y});
    nlohmann::json md_pts = nlohmann::json::array();
    for (const auto& p : v.md_pos_) md_pts.push_back({p.x, p.y});
    structural["es_positions"] = es_pts;
    structural["md_positions"] = md_pts;
    v.structural_hash_ = fnv1a64(structural.dump());
    structural.erase("queue_caps");
    v.model_hash_ = fnv1a64(structural.dump());

    nlohmann::json comparison = raw;
    comparison.erase("arrival_rates");
    v.comparison_hash_ = fnv1a64(comparison.dump());

    v.cfg_ = std::move(cfg);
    return v;
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::TransmissionBased:
        return "transmission";
    case PolicyKind::ComputationBased:
        return "computation";
    case PolicyKind::Backpressure:
        return "backpressure";
    case PolicyKind::RandomFeasible:
        return "random";
    case PolicyKind::LocalOffloadThreshold:
        return "local_threshold";
    case PolicyKind::Solved:
        return "solved";
    case PolicyKind::Mdp:
        return "mdp";
    }
    return "unknown";
}

PolicyKind parse_policy_name(const std::string& name) {
    for (PolicyKind k : {PolicyKind::TransmissionBased, PolicyKind::ComputationBased,
                         PolicyKind::Backpressure, PolicyKind::RandomFeasible,
                         PolicyKind::LocalOffloadThreshold, PolicyKind::Solved, PolicyKind::Mdp}) {
        if (policy_name(k) == name) {
            return k;
        }
    }
    throw MalformedConfig("$.policy_id", "unknown policy '" + name + "'");
}

} // namespace edgebench
