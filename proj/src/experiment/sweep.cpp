#include <edgebench/experiment/sweep.hpp>

#include <edgebench/core/scenario_io.hpp>
#include <edgebench/experiment/runner.hpp>
#include <edgebench/metrics/compare.hpp>
#include <edgebench/metrics/csv.hpp>

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

namespace edgebench::experiment {

namespace {

using nlohmann::json;

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    if (count <= 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
}

template <class T>
std::vector<T> nonempty_list(const json& j, const char* key, const std::string& what) {
    const std::string path = std::string("$.") + key;
    if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
        throw MalformedConfig(path, "expected a non-empty list of " + what);
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < j[key].size(); ++i) {
        try {
            out.push_back(j[key][i].get<T>());
        } catch (const json::exception&) {
            throw MalformedConfig(fmt::format("{}[{}]", path, i), "expected " + what);
        }
    }
    return out;
}

} // namespace

SweepSpec sweep_from_json(const json& j, const std::filesystem::path& dir) {
    if (!j.is_object()) throw MalformedConfig("$", "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "base_scenario" && key != "lambda_multipliers" && key != "policies" &&
            key != "seeds" && key != "output_dir") {
            throw MalformedConfig("$." + key, "unknown key");
        }
    }
    SweepSpec spec;
    if (!j.contains("base_scenario")) {
        throw MalformedConfig("$.base_scenario", "missing");
    }
    const json& base = j["base_scenario"];
    if (base.is_string()) {
        std::filesystem::path p = base.get<std::string>();
        spec.base = load_scenario(p.is_relative() ? dir / p : p);
    } else {
        spec.base = scenario_from_json(base);
    }

    spec.lambda_multipliers = nonempty_list<double>(j, "lambda_multipliers", "numbers");
    for (std::size_t i = 0; i < spec.lambda_multipliers.size(); ++i) {
        const double m = spec.lambda_multipliers[i];
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw MalformedConfig(fmt::format("$.lambda_multipliers[{}]", i), "must be positive");
        }
    }
    spec.seeds = nonempty_list<std::uint64_t>(j, "seeds", "non-negative integers");

    if (!j.contains("policies") || !j["policies"].is_array() || j["policies"].empty()) {
        throw MalformedConfig("$.policies", "expected a non-empty list of policies");
    }
    for (std::size_t i = 0; i < j["policies"].size(); ++i) {
        const json& pj = j["policies"][i];
        const std::string path = fmt::format("$.policies[{}]", i);
        if (pj.is_string()) {
            PolicySpec p = spec.base.policy;
            p.kind = parse_policy_name(pj.get<std::string>());
            spec.policies.push_back(p);
        } else {
            spec.policies.push_back(policy_from_json(pj, path));
        }
    }

    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw MalformedConfig("$.output_dir", "expected a path");
        std::filesystem::path out = j["output_dir"].get<std::string>();
        spec.output_dir = out.is_relative() ? dir / out : out;
    } else {
        spec.output_dir = dir;
    }
    return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
    return sweep_from_json(read_json_file(path), path.parent_path());
}

ScenarioConfig cell_scenario(const SweepSpec& spec, const PolicySpec& policy, double multiplier,
                             std::uint64_t seed) {
    ScenarioConfig c = spec.base;
    for (double& r : c.arrival_rates) r *= multiplier;
    c.policy = policy;
    c.rng_seed = seed;
    return c;
}

int worker_count() {
    if (const char* env = std::getenv("EDGEBENCH_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

std::vector<CellResult> run_sweep(const SweepSpec& spec, int threads) {
    struct Cell {
        std::size_t policy;
        double multiplier;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t p = 0; p < spec.policies.size(); ++p) {
        for (double m : spec.lambda_multipliers) {
            for (std::uint64_t s : spec.seeds) cells.push_back({p, m, s});
        }
    }

    std::vector<CellResult> out(cells.size());
    std::vector<std::optional<ValidatedConfig>> configs(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const PolicySpec& policy = spec.policies[c.policy];
        auto& r = out[i];
        r.label.scenario_id = spec.base.scenario_id;
        r.label.policy = policy_name(policy.kind);
        r.label.V = policy.V;
        r.label.lambda_multiplier = c.multiplier;
        r.label.seed = c.seed;
        try {
            configs[i] = validate_config(cell_scenario(spec, policy, c.multiplier, c.seed));
            r.label.comparison_hash = configs[i]->comparison_hash();
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    }

    // One solve per distinct MDP model.
    struct Solve {
        std::size_t cell;
        std::shared_ptr<const mdp::DeployedPolicy> policy;
        std::string error;
    };
    std::map<std::uint64_t, Solve> solves;
    std::vector<std::uint64_t> solve_key(cells.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!configs[i] || configs[i]->raw().policy.kind != PolicyKind::Mdp) continue;
        const auto key = mdp::mdp_spec_hash(configs[i]->model_hash(), configs[i]->raw().policy.mdp);
        solve_key[i] = key;
        solves.try_emplace(key, Solve{i, nullptr, {}});
    }
    std::vector<Solve*> pending;
    for (auto& [key, s] : solves) pending.push_back(&s);
    parallel_for(pending.size(), threads, [&](std::size_t n) {
        Solve& s = *pending[n];
        try {
            s.policy = solve_for(*configs[s.cell]);
        } catch (const std::exception& e) {
            s.error = e.what();
        }
    });

    parallel_for(cells.size(), threads, [&](std::size_t i) {
        if (!configs[i]) return;
        auto& r = out[i];
        try {
            std::shared_ptr<const mdp::DeployedPolicy> solved;
            if (solve_key[i] != 0) {
                const Solve& s = solves.at(solve_key[i]);
                if (!s.error.empty()) {
                    r.error = s.error;
                    return;
                }
                solved = s.policy;
            }
            const ValidatedConfig& cfg = *configs[i];
            r.summary = run_trajectory(cfg, make_policy(cfg, cells[i].seed, solved), r.label)
                            .summary;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });
    return out;
}

std::string sweep_csv(std::span<const CellResult> cells) {
    std::string out = metrics::summary_header() + ",error\n";
    const auto width = metrics::summary_columns().size();
    for (const auto& c : cells) {
        if (c.summary) {
            out += metrics::summary_row(*c.summary) + ",\n";
        } else {
            out += fmt::format("{},{},{},{},{}", metrics::csv_field(c.label.scenario_id),
                               metrics::csv_field(c.label.policy),
                               metrics::format_number(c.label.V),
                               metrics::format_number(c.label.lambda_multiplier), c.label.seed);
            out += std::string(width - 5, ',');
            out += "," + metrics::csv_field(c.error) + "\n";
        }
    }
    return out;
}

std::string comparison_csv(std::span<const CellResult> cells) {
    std::vector<metrics::RunSummary> ok;
    for (const auto& c : cells) {
        if (c.summary) ok.push_back(*c.summary);
    }
    std::string out = metrics::comparison_header() + "\n";
    for (const auto& row : metrics::compare_runs(ok)) out += metrics::comparison_row(row) + "\n";
    return out;
}

} // namespace edgebench::experiment
