#include <edgebench/core/scenario_io.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace edgebench {

namespace {

using nlohmann::json;

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }
std::string child(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw MalformedConfig(path, "expected an object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.contains(key)) {
            throw MalformedConfig(child(path, key), "unknown key");
        }
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw MalformedConfig(path, "expected a number");
    }
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) {
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && std::floor(d) == d) {
            return static_cast<std::int64_t>(d);
        }
    }
    throw MalformedConfig(path, "expected an integer");
}

std::uint64_t as_seed(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    const std::int64_t s = as_integer(v, path);
    if (s < 0) {
        throw MalformedConfig(path, "seed must be non-negative");
    }
    return static_cast<std::uint64_t>(s);
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw MalformedConfig(path, "expected a string");
    }
    return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw MalformedConfig(path, "expected an array");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_number(v[i], child(path, i)));
    }
    return out;
}

Placement as_placement(const json& v, const std::string& path) {
    if (v.is_array()) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::vector<double> xy = as_number_list(v[i], child(path, i));
            if (xy.size() != 2) {
                throw MalformedConfig(child(path, i), "expected [x, y]");
            }
            pts.push_back({xy[0], xy[1]});
        }
        return Placement::explicit_points(std::move(pts));
    }
    reject_unknown(v, path, {"placement", "seed"});
    if (!v.contains("placement")) {
        throw MalformedConfig(child(path, "placement"), "missing placement directive");
    }
    const std::string kind = as_string(v["placement"], child(path, "placement"));
    if (kind == "grid") {
        if (v.contains("seed")) {
            throw MalformedConfig(child(path, "seed"), "grid placement takes no seed");
        }
        return Placement::grid();
    }
    if (kind == "uniform") {
        std::optional<std::uint64_t> seed;
        if (v.contains("seed")) {
            seed = as_seed(v["seed"], child(path, "seed"));
        }
        return Placement::uniform(seed);
    }
    throw MalformedConfig(child(path, "placement"), "expected 'grid' or 'uniform'");
}

json placement_to_json(const Placement& p) {
    switch (p.kind) {
    case PlacementKind::Explicit: {
        json arr = json::array();
        for (const auto& pt : p.points) arr.push_back({pt.x, pt.y});
        return arr;
    }
    case PlacementKind::Grid:
        return {{"placement", "grid"}};
    case PlacementKind::Uniform: {
        json o = {{"placement", "uniform"}};
        if (p.seed) o["seed"] = *p.seed;
        return o;
    }
    }
    return nullptr;
}

json threshold_to_json(double theta) {
    if (std::isinf(theta)) return "inf";
    return theta;
}

double threshold_from_json(const json& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInfiniteThreshold;
        throw MalformedConfig(path, "expected a number or \"inf\"");
    }
    return as_number(v, path);
}

RewardKind reward_from_json(const json& v, const std::string& path) {
    const std::string s = as_string(v, path);
    if (s == "completions") return RewardKind::Completions;
    if (s == "admitted_throughput") return RewardKind::AdmittedThroughput;
    throw MalformedConfig(path, "expected 'completions' or 'admitted_throughput'");
}

} // namespace

PolicySpec policy_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"policy_id", "policy_params"});
    PolicySpec p;
    if (j.contains("policy_id")) {
        p.kind = parse_policy_name(as_string(j["policy_id"], child(path, "policy_id")));
    }
    if (j.contains("policy_params")) {
        const json& pp = j["policy_params"];
        const std::string pp_path = child(path, "policy_params");
        reject_unknown(pp, pp_path,
                       {"V", "theta", "migration_threshold", "policy_file", "q_max", "k_max",
                        "gamma", "epsilon", "reward_kind", "state_cap", "action_cap",
                        "iteration_cap"});
        if (pp.contains("V")) p.V = as_number(pp["V"], child(pp_path, "V"));
        if (pp.contains("theta")) p.theta = threshold_from_json(pp["theta"], child(pp_path, "theta"));
        if (pp.contains("migration_threshold"))
            p.migration_threshold =
                as_number(pp["migration_threshold"], child(pp_path, "migration_threshold"));
        if (pp.contains("policy_file"))
            p.policy_file = as_string(pp["policy_file"], child(pp_path, "policy_file"));
        if (pp.contains("q_max"))
            p.mdp.q_max = static_cast<int>(as_integer(pp["q_max"], child(pp_path, "q_max")));
        if (pp.contains("k_max"))
            p.mdp.k_max = static_cast<int>(as_integer(pp["k_max"], child(pp_path, "k_max")));
        if (pp.contains("gamma")) p.mdp.gamma = as_number(pp["gamma"], child(pp_path, "gamma"));
        if (pp.contains("epsilon"))
            p.mdp.epsilon = as_number(pp["epsilon"], child(pp_path, "epsilon"));
        if (pp.contains("reward_kind"))
            p.mdp.reward_kind = reward_from_json(pp["reward_kind"], child(pp_path, "reward_kind"));
        if (pp.contains("state_cap"))
            p.mdp.state_cap = as_number(pp["state_cap"], child(pp_path, "state_cap"));
        if (pp.contains("action_cap"))
            p.mdp.action_cap = as_number(pp["action_cap"], child(pp_path, "action_cap"));
        if (pp.contains("iteration_cap"))
            p.mdp.iteration_cap = as_integer(pp["iteration_cap"], child(pp_path, "iteration_cap"));
    }
    return p;
}

json policy_to_json(const PolicySpec& p) {
    json params = {
        {"V", p.V},
        {"theta", threshold_to_json(p.theta)},
        {"migration_threshold", p.migration_threshold},
        {"q_max", p.mdp.q_max},
        {"k_max", p.mdp.k_max},
        {"gamma", p.mdp.gamma},
        {"epsilon", p.mdp.epsilon},
        {"reward_kind",
         p.mdp.reward_kind == RewardKind::Completions ? "completions" : "admitted_throughput"},
        {"state_cap", p.mdp.state_cap},
        {"action_cap", p.mdp.action_cap},
        {"iteration_cap", p.mdp.iteration_cap},
    };
    if (!p.policy_file.empty()) params["policy_file"] = p.policy_file;
    return {{"policy_id", policy_name(p.kind)}, {"policy_params", params}};
}

ScenarioConfig scenario_from_json(const json& j) {
    const std::string root = "$";
    reject_unknown(j, root,
                   {"scenario_id", "num_mds", "num_ess", "horizon", "slot_duration", "area_side",
                    "es_positions", "md_positions", "task_size_bits", "task_cycles",
                    "deadline_slots", "arrival_rates", "arrival_kind", "power_levels",
                    "bandwidth_hz", "noise_psd", "pathloss_exponent", "reference_gain",
                    "reference_distance", "channel_states", "channel_transition", "cores_per_es",
                    "core_speed_hz", "local_compute", "backhaul_links", "queue_caps", "policy_id",
                    "policy_params", "rng_seed"});

    ScenarioConfig c;
    auto path = [&](const char* key) { return child(root, key); };
    auto num = [&](const char* key, double& out) {
        if (j.contains(key)) out = as_number(j[key], path(key));
    };

    if (j.contains("scenario_id")) c.scenario_id = as_string(j["scenario_id"], path("scenario_id"));
    if (j.contains("num_mds"))
        c.num_mds = static_cast<int>(as_integer(j["num_mds"], path("num_mds")));
    if (j.contains("num_ess"))
        c.num_ess = static_cast<int>(as_integer(j["num_ess"], path("num_ess")));
    if (j.contains("horizon")) c.horizon = as_integer(j["horizon"], path("horizon"));
    num("slot_duration", c.slot_duration);
    num("area_side", c.area_side);
    if (j.contains("es_positions"))
        c.es_positions = as_placement(j["es_positions"], path("es_positions"));
    if (j.contains("md_positions"))
        c.md_positions = as_placement(j["md_positions"], path("md_positions"));
    num("task_size_bits", c.task_size_bits);
    num("task_cycles", c.task_cycles);
    if (j.contains("deadline_slots"))
        c.deadline_slots = as_integer(j["deadline_slots"], path("deadline_slots"));

    if (j.contains("arrival_rates")) {
        const json& ar = j["arrival_rates"];
        if (ar.is_number()) {
            c.arrival_rates.assign(std::max(c.num_mds, 0), as_number(ar, path("arrival_rates")));
        } else {
            c.arrival_rates = as_number_list(ar, path("arrival_rates"));
        }
    } else {
        c.arrival_rates.assign(std::max(c.num_mds, 0), 0.5);
    }
    if (j.contains("arrival_kind")) {
        const std::string k = as_string(j["arrival_kind"], path("arrival_kind"));
        if (k == "bernoulli") {
            c.arrival_kind = ArrivalKind::Bernoulli;
        } else if (k == "poisson") {
            c.arrival_kind = ArrivalKind::Poisson;
        } else {
            throw MalformedConfig(path("arrival_kind"), "expected 'bernoulli' or 'poisson'");
        }
    }

    if (j.contains("power_levels"))
        c.power_levels = as_number_list(j["power_levels"], path("power_levels"));
    num("bandwidth_hz", c.bandwidth_hz);
    num("noise_psd", c.noise_psd);
    num("pathloss_exponent", c.pathloss_exponent);
    num("reference_gain", c.reference_gain);
    num("reference_distance", c.reference_distance);
    if (j.contains("channel_states"))
        c.channel_states = as_number_list(j["channel_states"], path("channel_states"));
    if (j.contains("channel_transition")) {
        const json& m = j["channel_transition"];
        if (!m.is_array()) throw MalformedConfig(path("channel_transition"), "expected an array");
        c.channel_transition.clear();
        for (std::size_t r = 0; r < m.size(); ++r) {
            c.channel_transition.push_back(as_number_list(m[r], child(path("channel_transition"), r)));
        }
    }

    if (j.contains("cores_per_es")) {
        const json& cv = j["cores_per_es"];
        if (cv.is_number()) {
            c.cores_per_es.assign(std::max(c.num_ess, 0),
                                  static_cast<int>(as_integer(cv, path("cores_per_es"))));
        } else {
            if (!cv.is_array()) throw MalformedConfig(path("cores_per_es"), "expected an array");
            for (std::size_t i = 0; i < cv.size(); ++i) {
                c.cores_per_es.push_back(
                    static_cast<int>(as_integer(cv[i], child(path("cores_per_es"), i))));
            }
        }
    } else {
        c.cores_per_es.assign(std::max(c.num_ess, 0), 4);
    }
    num("core_speed_hz", c.core_speed_hz);

    if (j.contains("local_compute") && !j["local_compute"].is_null()) {
        const json& lc = j["local_compute"];
        const std::string lp = path("local_compute");
        reject_unknown(lc, lp, {"local_core_speed_hz", "local_energy_coeff"});
        LocalCompute local;
        if (lc.contains("local_core_speed_hz"))
            local.local_core_speed_hz =
                as_number(lc["local_core_speed_hz"], child(lp, "local_core_speed_hz"));
        if (lc.contains("local_energy_coeff"))
            local.local_energy_coeff =
                as_number(lc["local_energy_coeff"], child(lp, "local_energy_coeff"));
        c.local_compute = local;
    }

    if (j.contains("backhaul_links")) {
        const json& links = j["backhaul_links"];
        if (!links.is_array()) throw MalformedConfig(path("backhaul_links"), "expected an array");
        for (std::size_t l = 0; l < links.size(); ++l) {
            const std::string lp = child(path("backhaul_links"), l);
            const json& lj = links[l];
            reject_unknown(lj, lp, {"es_a", "es_b", "delay_slots", "capacity_tasks_per_slot"});
            for (const char* key : {"es_a", "es_b", "delay_slots", "capacity_tasks_per_slot"}) {
                if (!lj.contains(key)) throw MalformedConfig(child(lp, key), "missing");
            }
            BackhaulLink link;
            link.es_a = static_cast<int>(as_integer(lj["es_a"], child(lp, "es_a")));
            link.es_b = static_cast<int>(as_integer(lj["es_b"], child(lp, "es_b")));
            link.delay_slots = static_cast<int>(as_integer(lj["delay_slots"], child(lp, "delay_slots")));
            link.capacity_tasks_per_slot =
                as_integer(lj["capacity_tasks_per_slot"], child(lp, "capacity_tasks_per_slot"));
            c.backhaul_links.push_back(link);
        }
    }

    if (j.contains("queue_caps")) {
        const json& qc = j["queue_caps"];
        const std::string qp = path("queue_caps");
        reject_unknown(qc, qp, {"q_max", "k_max"});
        if (qc.contains("q_max")) c.queue_caps.q_max = as_integer(qc["q_max"], child(qp, "q_max"));
        if (qc.contains("k_max")) c.queue_caps.k_max = as_integer(qc["k_max"], child(qp, "k_max"));
    }

    json policy_part = json::object();
    if (j.contains("policy_id")) policy_part["policy_id"] = j["policy_id"];
    if (j.contains("policy_params")) policy_part["policy_params"] = j["policy_params"];
    c.policy = policy_from_json(policy_part, root);

    if (j.contains("rng_seed")) c.rng_seed = as_seed(j["rng_seed"], path("rng_seed"));
    return c;
}

json scenario_to_json(const ScenarioConfig& c) {
    json j;
    j["scenario_id"] = c.scenario_id;
    j["num_mds"] = c.num_mds;
    j["num_ess"] = c.num_ess;
    j["horizon"] = c.horizon;
    j["slot_duration"] = c.slot_duration;
    j["area_side"] = c.area_side;
    j["es_positions"] = placement_to_json(c.es_positions);
    j["md_positions"] = placement_to_json(c.md_positions);
    j["task_size_bits"] = c.task_size_bits;
    j["task_cycles"] = c.task_cycles;
    j["deadline_slots"] = c.deadline_slots;
    j["arrival_rates"] = c.arrival_rates;
    j["arrival_kind"] = c.arrival_kind == ArrivalKind::Bernoulli ? "bernoulli" : "poisson";
    j["power_levels"] = c.power_levels;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["noise_psd"] = c.noise_psd;
    j["pathloss_exponent"] = c.pathloss_exponent;
    j["reference_gain"] = c.reference_gain;
    j["reference_distance"] = c.reference_distance;
    j["channel_states"] = c.channel_states;
    j["channel_transition"] = c.channel_transition;
    j["cores_per_es"] = c.cores_per_es;
    j["core_speed_hz"] = c.core_speed_hz;
    if (c.local_compute) {
        j["local_compute"] = {{"local_core_speed_hz", c.local_compute->local_core_speed_hz},
                              {"local_energy_coeff", c.local_compute->local_energy_coeff}};
    } else {
        j["local_compute"] = nullptr;
    }
    j["backhaul_links"] = json::array();
    for (const auto& l : c.backhaul_links) {
        j["backhaul_links"].push_back({{"es_a", l.es_a},
                                       {"es_b", l.es_b},
                                       {"delay_slots", l.delay_slots},
                                       {"capacity_tasks_per_slot", l.capacity_tasks_per_slot}});
    }
    j["queue_caps"] = {{"q_max", c.queue_caps.q_max}, {"k_max", c.queue_caps.k_max}};
    const json pj = policy_to_json(c.policy);
    j["policy_id"] = pj["policy_id"];
    j["policy_params"] = pj["policy_params"];
    j["rng_seed"] = c.rng_seed;
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileNotFound(path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw MalformedConfig("$", std::string("invalid JSON: ") + e.what());
    }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    ScenarioConfig c = scenario_from_json(read_json_file(path));
    // A relative policy file is relative to the scenario that names it.
    if (!c.policy.policy_file.empty()) {
        const std::filesystem::path pf(c.policy.policy_file);
        if (pf.is_relative()) c.policy.policy_file = (path.parent_path() / pf).string();
    }
    return c;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace edgebench
