#include <edgebench/core/errors.hpp>
#include <edgebench/core/scenario_io.hpp>
#include <edgebench/experiment/presets.hpp>
#include <edgebench/experiment/runner.hpp>
#include <edgebench/experiment/sweep.hpp>
#include <edgebench/metrics/csv.hpp>

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace edgebench;
using nlohmann::json;
using edgebench::test_util::scenario;

namespace {

fs::path work_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "edgebench_test_experiment" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream s(text);
    for (std::string line; std::getline(s, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& row) {
    std::vector<std::string> out;
    std::stringstream s(row);
    for (std::string f; std::getline(s, f, ',');) out.push_back(f);
    return out;
}

ScenarioConfig small(std::int64_t horizon = 200) {
    ScenarioConfig c = scenario(3, 2, 0.4);
    c.scenario_id = "small";
    c.horizon = horizon;
    return c;
}

json sweep_json(const ScenarioConfig& base) {
    return {{"base_scenario", scenario_to_json(base)},
            {"lambda_multipliers", {0.5, 1.0, 2.0}},
            {"policies", {"backpressure", "transmission"}},
            {"seeds", {1, 2, 3, 4, 5}}};
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

// The environment can point at another build of the binary.
std::string cli_path() {
    const char* env = std::getenv("EDGEBENCH_CLI");
    return env != nullptr ? env : EDGEBENCH_CLI_PATH;
}

CliResult cli(const std::string& args, const fs::path& dir) {
    const std::string exe = cli_path();
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd =
        "\"" + exe + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
        err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

} // namespace

TEST(SweepSpec, ParsesInlineBaseAndPolicyObjects) {
    json j = sweep_json(small());
    j["policies"].push_back({{"policy_id", "backpressure"}, {"policy_params", {{"V", 5.0}}}});
    const auto spec = experiment::sweep_from_json(j, "/tmp/x");
    EXPECT_EQ(spec.base.scenario_id, "small");
    EXPECT_EQ(spec.lambda_multipliers, (std::vector<double>{0.5, 1.0, 2.0}));
    ASSERT_EQ(spec.policies.size(), 3U);
    EXPECT_EQ(spec.policies[1].kind, PolicyKind::TransmissionBased);
    EXPECT_EQ(spec.policies[2].V, 5.0);
    EXPECT_EQ(spec.seeds.size(), 5U);
    EXPECT_EQ(spec.output_dir, fs::path("/tmp/x"));
}

TEST(SweepSpec, BaseScenarioPathIsRelativeToSweep) {
    const auto dir = work_dir("relative");
    write(dir / "base.json", scenario_to_json(small()).dump());
    json j = sweep_json(small());
    j["base_scenario"] = "base.json";
    j["output_dir"] = "results";
    write(dir / "sweep.json", j.dump());
    const auto spec = experiment::load_sweep(dir / "sweep.json");
    EXPECT_EQ(spec.base.num_mds, 3);
    EXPECT_EQ(spec.output_dir, dir / "results");
}

TEST(SweepSpec, RejectsBadInput) {
    auto expect_path = [](json j, const std::string& path) {
        try {
            experiment::sweep_from_json(j, ".");
            ADD_FAILURE() << "accepted " << path;
        } catch (const MalformedConfig& e) {
            EXPECT_EQ(e.field(), path);
        }
    };
    json j = sweep_json(small());
    j["extra"] = 1;
    expect_path(j, "$.extra");
    j = sweep_json(small());
    j["lambda_multipliers"] = json::array();
    expect_path(j, "$.lambda_multipliers");
    j = sweep_json(small());
    j["lambda_multipliers"] = {1.0, 0.0};
    expect_path(j, "$.lambda_multipliers[1]");
    j = sweep_json(small());
    j["seeds"] = {1, "two"};
    expect_path(j, "$.seeds[1]");
    j = sweep_json(small());
    j.erase("policies");
    expect_path(j, "$.policies");
    j = sweep_json(small());
    j.erase("base_scenario");
    expect_path(j, "$.base_scenario");
    j = sweep_json(small());
    j["policies"] = {"not-a-policy"};
    EXPECT_THROW(experiment::sweep_from_json(j, "."), MalformedConfig);
    EXPECT_THROW(experiment::load_sweep("/nonexistent/sweep.json"), FileNotFound);
}

TEST(Sweep, ProductOfAxesInFixedOrder) {
    const auto spec = experiment::sweep_from_json(sweep_json(small()), ".");
    const auto cells = experiment::run_sweep(spec, 1);
    ASSERT_EQ(cells.size(), 30U);
    std::size_t n = 0;
    for (const std::string policy : {"backpressure", "transmission"}) {
        for (double m : {0.5, 1.0, 2.0}) {
            for (std::uint64_t seed = 1; seed <= 5; ++seed, ++n) {
                ASSERT_TRUE(cells[n].summary) << cells[n].error;
                EXPECT_EQ(cells[n].label.policy, policy);
                EXPECT_EQ(cells[n].label.lambda_multiplier, m);
                EXPECT_EQ(cells[n].label.seed, seed);
            }
        }
    }
    const auto csv = lines(experiment::sweep_csv(cells));
    ASSERT_EQ(csv.size(), 31U);
    EXPECT_EQ(csv[0], metrics::summary_header() + ",error");
    const auto cmp = lines(experiment::comparison_csv(cells));
    EXPECT_EQ(cmp.size(), 1U + 6U);
}

TEST(Sweep, CellMatchesStandaloneRun) {
    const auto spec = experiment::sweep_from_json(sweep_json(small()), ".");
    const auto cells = experiment::run_sweep(spec, 2);
    const auto cfg = validate_config(experiment::cell_scenario(spec, spec.policies[1], 2.0, 4));
    const auto solo = experiment::run_trajectory(cfg, experiment::make_policy(cfg, 4),
                                                 experiment::label_for(cfg, 2.0));
    // policy 1, multiplier index 2, seed index 3
    const auto& cell = cells[1 * 15 + 2 * 5 + 3];
    EXPECT_EQ(metrics::summary_row(*cell.summary), metrics::summary_row(solo.summary));
}

TEST(Sweep, RerunIsByteIdenticalAcrossThreadCounts) {
    const auto spec = experiment::sweep_from_json(sweep_json(small()), ".");
    const auto a = experiment::run_sweep(spec, 1);
    const auto b = experiment::run_sweep(spec, 3);
    EXPECT_EQ(experiment::sweep_csv(a), experiment::sweep_csv(b));
    EXPECT_EQ(experiment::comparison_csv(a), experiment::comparison_csv(b));
}

TEST(Sweep, FailedCellsKeepTheirRow) {
    json j = sweep_json(small(50));
    j["policies"] = {"backpressure", "local_threshold"};
    j["seeds"] = {1};
    const auto spec = experiment::sweep_from_json(j, ".");
    const auto cells = experiment::run_sweep(spec, 1);
    ASSERT_EQ(cells.size(), 6U);
    for (int n = 0; n < 3; ++n) EXPECT_TRUE(cells[n].summary);
    for (int n = 3; n < 6; ++n) {
        EXPECT_FALSE(cells[n].summary);
        EXPECT_NE(cells[n].error.find("local"), std::string::npos) << cells[n].error;
    }
    const auto csv = lines(experiment::sweep_csv(cells));
    ASSERT_EQ(csv.size(), 7U);
    const auto width = metrics::summary_columns().size() + 1;
    for (const auto& row : csv) EXPECT_EQ(fields(row + " ").size(), width) << row;
    EXPECT_EQ(csv[4].rfind("small,local_threshold,0,0.5,1,", 0), 0U);
}

TEST(Sweep, MdpCellsShareOneSolve) {
    ScenarioConfig base = scenario(1, 1, 0.5, 1);
    base.scenario_id = "tiny";
    base.horizon = 300;
    base.queue_caps = {2, 2};
    json j = {{"base_scenario", scenario_to_json(base)},
              {"lambda_multipliers", {1.0, 1.5}},
              {"policies", {{{"policy_id", "mdp"}, {"policy_params", {{"q_max", 2}, {"k_max", 2}}}}}},
              {"seeds", {1, 2}}};
    const auto cells = experiment::run_sweep(experiment::sweep_from_json(j, "."), 2);
    ASSERT_EQ(cells.size(), 4U);
    for (const auto& c : cells) EXPECT_TRUE(c.summary) << c.error;
}

TEST(Presets, KnownNames) {
    EXPECT_EQ(experiment::preset_names(),
              (std::vector<std::string>{"case-study", "case-study-small"}));
    const auto big = experiment::preset("case-study");
    EXPECT_EQ(big.base.num_mds, 40);
    EXPECT_EQ(big.base.num_ess, 4);
    EXPECT_EQ(big.base.area_side, 100.0);
    EXPECT_EQ(big.seeds.size(), 20U);
    EXPECT_NO_THROW(validate_config(big.base));
    const auto tiny = experiment::preset("case-study-small");
    EXPECT_EQ(tiny.policies.front().kind, PolicyKind::Mdp);
    EXPECT_NO_THROW(validate_config(tiny.base));
    EXPECT_THROW(experiment::preset("nope"), MalformedConfig);
}

TEST(Cli, RunPrintsOneRow) {
    const auto dir = work_dir("cli_run");
    write(dir / "s.json", scenario_to_json(small()).dump(2));
    const auto r = cli("run --scenario \"" + (dir / "s.json").string() + "\"", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 2U);
    EXPECT_EQ(rows[0], metrics::summary_header());
    EXPECT_EQ(fields(rows[1]).size(), metrics::summary_columns().size());

    const auto again = cli("run --scenario \"" + (dir / "s.json").string() + "\"", dir);
    EXPECT_EQ(again.out, r.out);
}

TEST(Cli, MissingFile) {
    const auto dir = work_dir("cli_missing");
    const auto r = cli("run --scenario /nonexistent/where.json", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/nonexistent/where.json"), std::string::npos) << r.err;
}

TEST(Cli, MalformedConfig) {
    const auto dir = work_dir("cli_malformed");
    json j = scenario_to_json(small());
    j["arrival_rates"] = {0.1, -0.2, 0.1};
    write(dir / "bad.json", j.dump());
    auto r = cli("run --scenario \"" + (dir / "bad.json").string() + "\"", dir);
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("arrival_rates[1]"), std::string::npos) << r.err;
    write(dir / "broken.json", "{ not json");
    r = cli("run --scenario \"" + (dir / "broken.json").string() + "\"", dir);
    EXPECT_EQ(r.code, 3);
}

TEST(Cli, UsageErrors) {
    const auto dir = work_dir("cli_usage");
    EXPECT_EQ(cli("", dir).code, 1);
    EXPECT_EQ(cli("run", dir).code, 1);
    EXPECT_EQ(cli("sweep", dir).code, 1);
    EXPECT_EQ(cli("sweep --preset nope", dir).code, 3);
}

TEST(Cli, SeedOverrideChangesOnlySeedDependentFields) {
    const auto dir = work_dir("cli_seed");
    ScenarioConfig c = small();
    c.md_positions = Placement::uniform(3);  // placement independent of rng_seed
    write(dir / "s.json", scenario_to_json(c).dump());
    const auto base = cli("run --scenario \"" + (dir / "s.json").string() + "\"", dir);
    const auto over =
        cli("run --seed 42 --scenario \"" + (dir / "s.json").string() + "\"", dir);
    ASSERT_EQ(base.code, 0);
    ASSERT_EQ(over.code, 0);
    const auto a = fields(lines(base.out)[1]);
    const auto b = fields(lines(over.out)[1]);
    for (int col = 0; col < 4; ++col) EXPECT_EQ(a[col], b[col]) << col;
    EXPECT_EQ(b[4], "42");
    EXPECT_NE(a, b);

    c.rng_seed = 42;
    write(dir / "s42.json", scenario_to_json(c).dump());
    const auto direct = cli("run --scenario \"" + (dir / "s42.json").string() + "\"", dir);
    EXPECT_EQ(direct.out, over.out);
}

TEST(Cli, TraceAndOutFiles) {
    const auto dir = work_dir("cli_trace");
    write(dir / "s.json", scenario_to_json(small(25)).dump());
    const auto r = cli("run --scenario \"" + (dir / "s.json").string() + "\" --out \"" +
                           (dir / "o" / "summary.csv").string() + "\" --trace \"" +
                           (dir / "trace.csv").string() + "\"",
                       dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(lines(slurp(dir / "o" / "summary.csv")).size(), 2U);
    const auto trace = lines(slurp(dir / "trace.csv"));
    ASSERT_EQ(trace.size(), 1U + 25U * 3U * 2U);
    EXPECT_EQ(trace[0], metrics::trace_header());
}

TEST(Cli, SweepWritesCsvs) {
    const auto dir = work_dir("cli_sweep");
    json j = sweep_json(small(60));
    j["output_dir"] = "out";
    write(dir / "sweep.json", j.dump());
    auto r = cli("sweep --sweep \"" + (dir / "sweep.json").string() + "\"", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto first = slurp(dir / "out" / "sweep.csv");
    EXPECT_EQ(lines(first).size(), 31U);
    EXPECT_EQ(lines(slurp(dir / "out" / "comparison.csv")).size(), 7U);
    r = cli("sweep --sweep \"" + (dir / "sweep.json").string() + "\"", dir);
    EXPECT_EQ(slurp(dir / "out" / "sweep.csv"), first);
}

TEST(Cli, SolveThenRunSolvedPolicy) {
    const auto dir = work_dir("cli_solve");
    ScenarioConfig c = scenario(1, 1, 0.5, 1);
    c.horizon = 500;
    c.policy.kind = PolicyKind::Mdp;
    c.policy.mdp.q_max = 2;
    c.policy.mdp.k_max = 2;
    c.policy.mdp.epsilon = 1e-8;
    write(dir / "tiny.json", scenario_to_json(c).dump());
    auto r = cli("solve --scenario \"" + (dir / "tiny.json").string() + "\" --out \"" +
                     (dir / "policy.json").string() + "\"",
                 dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("states 18"), std::string::npos) << r.out;
    const auto residual = r.out.find("residual ");
    ASSERT_NE(residual, std::string::npos);
    EXPECT_LE(std::stod(r.out.substr(residual + 9)), 1e-8);
    EXPECT_TRUE(fs::exists(dir / "policy.json"));

    c.policy.kind = PolicyKind::Solved;
    c.policy.policy_file = "policy.json";  // relative to the scenario file
    write(dir / "deploy.json", scenario_to_json(c).dump());
    r = cli("run --scenario \"" + (dir / "deploy.json").string() + "\"", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(fields(lines(r.out)[1])[1], "solved");

    // Same policy file against a different model.
    c.cores_per_es = {2};
    write(dir / "other.json", scenario_to_json(c).dump());
    r = cli("run --scenario \"" + (dir / "other.json").string() + "\"", dir);
    EXPECT_EQ(r.code, 5);
    EXPECT_NE(r.err.find("solved for config"), std::string::npos) << r.err;
}

TEST(Cli, SolveRejectsLargeInstance) {
    const auto dir = work_dir("cli_large");
    ScenarioConfig c = scenario(40, 4);
    c.policy.kind = PolicyKind::Mdp;
    write(dir / "big.json", scenario_to_json(c).dump());
    const auto r = cli("solve --scenario \"" + (dir / "big.json").string() + "\" --out \"" +
                           (dir / "p.json").string() + "\"",
                       dir);
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("cap is"), std::string::npos) << r.err;
}

TEST(Cli, PresetsListing) {
    const auto dir = work_dir("cli_presets");
    const auto r = cli("presets", dir);
    ASSERT_EQ(r.code, 0);
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 2U);
    EXPECT_EQ(rows[0].rfind("case-study: 40 MDs, 4 ESs", 0), 0U);
    EXPECT_EQ(rows[1].rfind("case-study-small: 2 MDs, 2 ESs", 0), 0U);
}
