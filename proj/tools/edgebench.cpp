// edgebench command-line front end. Exit codes: 0 success, 1 usage error,
// 2 file not found, 3 malformed config, 4 state space too large, 5 any
// other runtime error.

#include <edgebench/core/scenario_io.hpp>
#include <edgebench/experiment/presets.hpp>
#include <edgebench/experiment/runner.hpp>
#include <edgebench/experiment/sweep.hpp>
#include <edgebench/mdp/solved_policy.hpp>
#include <edgebench/metrics/csv.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace edgebench;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNotFound = 2, kMalformed = 3, kTooLarge = 4, kRuntime = 5 };

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

int cmd_run(const fs::path& scenario, std::optional<std::uint64_t> seed, const fs::path& out,
            const fs::path& trace) {
    ScenarioConfig raw = load_scenario(scenario);
    if (seed) raw.rng_seed = *seed;
    const ValidatedConfig cfg = validate_config(std::move(raw));

    std::string trace_text;
    experiment::Observer observer;
    if (!trace.empty()) {
        trace_text = metrics::trace_header() + "\n";
        observer = [&](const dynamics::SlotRecord& rec) {
            metrics::append_trace_rows(trace_text, rec, cfg.num_mds(), cfg.num_ess());
        };
    }
    const auto result = experiment::run_scenario(cfg, observer);
    const std::string csv =
        metrics::summary_header() + "\n" + metrics::summary_row(result.summary) + "\n";
    if (out.empty()) {
        std::cout << csv;
    } else {
        write_file(out, csv);
    }
    if (!trace.empty()) write_file(trace, trace_text);
    return kOk;
}

int cmd_sweep(const fs::path& sweep, const std::string& preset, const fs::path& out) {
    experiment::SweepSpec spec =
        preset.empty() ? experiment::load_sweep(sweep) : experiment::preset(preset);
    if (!out.empty()) spec.output_dir = out;

    const auto cells = experiment::run_sweep(spec, experiment::worker_count());
    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.summary ? 0 : 1;

    write_file(spec.output_dir / "sweep.csv", experiment::sweep_csv(cells));
    write_file(spec.output_dir / "comparison.csv", experiment::comparison_csv(cells));
    std::cerr << fmt::format("{} runs, {} failed; wrote {}\n", cells.size(), failed,
                             (spec.output_dir / "sweep.csv").string());
    return kOk;
}

int cmd_solve(const fs::path& scenario, const fs::path& out) {
    const ValidatedConfig cfg = validate_config(load_scenario(scenario));
    const mdp::MdpSpec spec(cfg, cfg.raw().policy.mdp);
    const mdp::SolvedPolicy policy = mdp::solve(spec);
    mdp::save_solved_policy(policy, out);
    std::cout << fmt::format("states {}\niterations {}\nresidual {}\nwrote {}\n",
                             policy.actions.size(), policy.iterations,
                             metrics::format_number(policy.residual), out.string());
    return kOk;
}

int cmd_presets() {
    for (const auto& name : experiment::preset_names()) {
        const auto spec = experiment::preset(name);
        std::cout << fmt::format("{}: {} MDs, {} ESs, {} policies x {} multipliers x {} seeds\n",
                                 name, spec.base.num_mds, spec.base.num_ess, spec.policies.size(),
                                 spec.lambda_multipliers.size(), spec.seeds.size());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slotted multi-access edge computing simulator"};
    app.require_subcommand(1);

    fs::path scenario, sweep_path, out, trace;
    std::optional<std::uint64_t> seed;
    std::string preset;

    auto* run = app.add_subcommand("run", "Simulate one scenario and print its summary row");
    run->add_option("--scenario", scenario, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Override rng_seed");
    run->add_option("--out", out, "Write the summary CSV here instead of stdout");
    run->add_option("--trace", trace, "Write a per-slot trace CSV");

    auto* sweep = app.add_subcommand("sweep", "Run an arrival-rate sweep");
    auto* sweep_opt = sweep->add_option("--sweep", sweep_path, "Sweep JSON file");
    auto* preset_opt = sweep->add_option("--preset", preset, "Bundled sweep name");
    sweep_opt->excludes(preset_opt);
    sweep->add_option("--out", out, "Output directory");

    auto* solve = app.add_subcommand("solve", "Solve the truncated MDP of a small scenario");
    solve->add_option("--scenario", scenario, "Scenario JSON file")->required();
    solve->add_option("--out", out, "Solved policy file")->required();

    auto* presets = app.add_subcommand("presets", "List bundled sweeps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (run->parsed()) return cmd_run(scenario, seed, out, trace);
        if (sweep->parsed()) {
            if (sweep_path.empty() && preset.empty()) {
                std::cerr << "sweep: one of --sweep or --preset is required\n";
                return kUsage;
            }
            return cmd_sweep(sweep_path, preset, out);
        }
        if (solve->parsed()) return cmd_solve(scenario, out);
        if (presets->parsed()) return cmd_presets();
    } catch (const FileNotFound& e) {
        std::cerr << "error: file not found: " << e.path().string() << "\n";
        return kNotFound;
    } catch (const MalformedConfig& e) {
        std::cerr << "error: malformed config: " << e.what() << "\n";
        return kMalformed;
    } catch (const StateSpaceTooLarge& e) {
        std::cerr << "error: " << e.what()
                  << "; use fewer MDs/ESs, smaller q_max/k_max or fewer channel states\n";
        return kTooLarge;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
