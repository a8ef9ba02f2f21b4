#include <edgebench/dynamics/dynamics.hpp>
#include <edgebench/experiment/runner.hpp>
#include <edgebench/policies/policies.hpp>

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace edgebench;
using edgebench::test_util::filled;
using edgebench::test_util::scenario;

namespace {

// One MD 10 m from one ES with unit fading, B = 1 MHz and N0 = 1e-13, so
// that p = 0.1 W gives snr = 1.
ScenarioConfig unit_snr_link() {
    ScenarioConfig c = scenario(1, 1, 1.0, 1);
    c.es_positions = Placement::explicit_points({{50, 50}});
    c.md_positions = Placement::explicit_points({{60, 50}});
    c.bandwidth_hz = 1e6;
    c.noise_psd = 1e-13;
    c.slot_duration = 0.1;
    c.task_size_bits = 5e4;
    c.channel_states = {1.0};
    c.channel_transition = {{1.0}};
    c.power_levels = {0.0, 0.1};
    return c;
}

Action send(int U, int J, int md, int es, double p) {
    Action a = Action::idle(U, J);
    a.assoc[md] = es;
    a.power[md] = p;
    return a;
}

SystemState backlog(const ValidatedConfig& cfg, std::int64_t q, std::int64_t k) {
    return SystemState::with_backlog(cfg, filled(cfg.num_mds(), q), filled(cfg.num_links(), k),
                                     std::vector<int>(cfg.num_links(), 0));
}

experiment::DecideFn random_policy(const ValidatedConfig& cfg) {
    return experiment::make_policy(cfg, cfg.raw().rng_seed);
}

ScenarioConfig with_random_policy(ScenarioConfig c, std::mt19937_64& rng) {
    if (c.local_compute) {
        c.policy.kind = PolicyKind::LocalOffloadThreshold;
        c.policy.theta = std::uniform_int_distribution<int>(0, 4)(rng);
    } else {
        c.policy.kind = PolicyKind::RandomFeasible;
    }
    return c;
}

} // namespace

TEST(Arrivals, ZeroAndCertainRates) {
    ScenarioConfig c = scenario(2, 1);
    c.arrival_rates = {0.0, 1.0};
    const auto cfg = validate_config(c);
    for (int t = 0; t < 1000; ++t) {
        const auto a = dynamics::draw_arrivals(cfg, t, 3);
        ASSERT_EQ(a[0], 0);
        ASSERT_EQ(a[1], 1);
    }
}

TEST(Arrivals, BernoulliMean) {
    const auto cfg = validate_config(scenario(1, 1, 0.4));
    double sum = 0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) sum += static_cast<double>(dynamics::draw_arrivals(cfg, t, 9)[0]);
    EXPECT_NEAR(sum / n, 0.4, 0.01);
}

TEST(Arrivals, PoissonMeanAndVariance) {
    for (double lambda : {2.5, 350.0}) {
        ScenarioConfig c = scenario(1, 1, lambda);
        c.arrival_kind = ArrivalKind::Poisson;
        const auto cfg = validate_config(c);
        double sum = 0, sq = 0;
        const int n = 50000;
        for (int t = 0; t < n; ++t) {
            const double a = static_cast<double>(dynamics::draw_arrivals(cfg, t, 5)[0]);
            sum += a;
            sq += a * a;
        }
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        EXPECT_NEAR(mean, lambda, 4 * std::sqrt(lambda / n)) << lambda;
        EXPECT_NEAR(var / lambda, 1.0, 0.05) << lambda;
    }
}

TEST(Arrivals, IndependentOfOtherMds) {
    // A stream is keyed by MD index, so adding MDs does not disturb earlier ones.
    const auto small = validate_config(scenario(2, 1, 0.5));
    const auto big = validate_config(scenario(5, 1, 0.5));
    for (int t = 0; t < 200; ++t) {
        const auto a = dynamics::draw_arrivals(small, t, 77);
        const auto b = dynamics::draw_arrivals(big, t, 77);
        ASSERT_EQ(a[0], b[0]);
        ASSERT_EQ(a[1], b[1]);
    }
}

TEST(Channels, IdentityKeepsIndices) {
    ScenarioConfig c = scenario(2, 2);
    c.channel_transition = {{1.0, 0.0}, {0.0, 1.0}};
    const auto cfg = validate_config(c);
    std::vector<int> idx{0, 1, 1, 0};
    for (int t = 0; t < 500; ++t) idx = dynamics::evolve_channels(idx, cfg, t, 1);
    EXPECT_EQ(idx, (std::vector<int>{0, 1, 1, 0}));
}

TEST(Channels, FlipAlternates) {
    ScenarioConfig c = scenario(1, 1);
    c.channel_transition = {{0.0, 1.0}, {1.0, 0.0}};
    const auto cfg = validate_config(c);
    std::vector<int> idx{0};
    for (int t = 0; t < 50; ++t) {
        idx = dynamics::evolve_channels(idx, cfg, t, 1);
        ASSERT_EQ(idx[0], t % 2 == 0 ? 1 : 0);
    }
}

TEST(Channels, StationaryOccupancy) {
    ScenarioConfig c = scenario(1, 1);
    c.channel_transition = {{0.9, 0.1}, {0.5, 0.5}};
    const auto cfg = validate_config(c);
    // Oracle: pi0 * 0.1 = pi1 * 0.5 with pi0 + pi1 = 1.
    const double pi0 = 0.5 / (0.1 + 0.5);
    EXPECT_NEAR(pi0, 5.0 / 6.0, 1e-15);
    std::vector<int> idx{0};
    int zero = 0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        idx = dynamics::evolve_channels(idx, cfg, t, 21);
        zero += idx[0] == 0;
    }
    EXPECT_NEAR(static_cast<double>(zero) / n, 5.0 / 6.0, 0.01);
}

TEST(Rates, ZeroPowerNoRate) {
    const auto cfg = validate_config(unit_snr_link());
    EXPECT_EQ(dynamics::link_rate(cfg, 0, 0, 0, 0.0, 1), 0);
    const auto r = dynamics::transmission_rates(cfg, std::vector<int>{0}, Action::idle(1, 1));
    EXPECT_EQ(r[0], 0);
}

TEST(Rates, ShannonExample) {
    const auto cfg = validate_config(unit_snr_link());
    EXPECT_NEAR(cfg.gain(0, 0), 1e-6, 1e-18);
    // Oracle: snr = 0.1 * 1e-6 / (1e-13 * 1e6) = 1, bits = 0.1 * 1e6 * log2(2) = 1e5.
    const long double snr = 0.1L * 1e-6L / (1e-13L * 1e6L);
    const long double bits = 0.1L * 1e6L * std::log2(1.0L + snr);
    EXPECT_EQ(static_cast<long long>(std::floor(bits / 5e4L + 1e-9L)), 2);
    EXPECT_EQ(dynamics::link_rate(cfg, 0, 0, 0, 0.1, 1), 2);
    const auto r = dynamics::transmission_rates(cfg, std::vector<int>{0}, send(1, 1, 0, 0, 0.1));
    EXPECT_EQ(r[0], 2);
}

TEST(Rates, SharingAsymptotics) {
    ScenarioConfig c = unit_snr_link();
    c.task_size_bits = 1.0;  // rate in bits, for resolution
    c.power_levels = {0.0, 1e-6, 1e6};
    const auto cfg = validate_config(c);
    // snr << 1: share * log2(1 + k / share) ~ k / ln 2, independent of share.
    const double low1 = static_cast<double>(dynamics::link_rate(cfg, 0, 0, 0, 1e-6, 1));
    const double low2 = static_cast<double>(dynamics::link_rate(cfg, 0, 0, 0, 1e-6, 2));
    EXPECT_NEAR(low2 / low1, 1.0, 0.01);
    // snr >> 1: halving the share roughly halves the rate.
    const double hi1 = static_cast<double>(dynamics::link_rate(cfg, 0, 0, 0, 1e6, 1));
    const double hi2 = static_cast<double>(dynamics::link_rate(cfg, 0, 0, 0, 1e6, 2));
    EXPECT_NEAR(hi2 / hi1, 0.5, 0.05);
}

TEST(Rates, BandwidthSplitCountsTransmittersOnly) {
    ScenarioConfig c = unit_snr_link();
    c.num_mds = 2;
    c.arrival_rates = {1, 1};
    c.md_positions = Placement::explicit_points({{60, 50}, {60, 50}});
    const auto cfg = validate_config(c);
    Action a = send(2, 1, 0, 0, 0.1);
    a.assoc[1] = 0;  // associated but silent
    const auto solo = dynamics::transmission_rates(cfg, std::vector<int>{0, 0}, a);
    EXPECT_EQ(solo[0], dynamics::link_rate(cfg, 0, 0, 0, 0.1, 1));
    a.power[1] = 0.1;
    const auto shared = dynamics::transmission_rates(cfg, std::vector<int>{0, 0}, a);
    EXPECT_EQ(shared[0], dynamics::link_rate(cfg, 0, 0, 0, 0.1, 2));
    EXPECT_EQ(shared[0], shared[1]);
}

TEST(Rates, ComputingRate) {
    ScenarioConfig c = scenario(1, 1, 0.3, 2);
    c.core_speed_hz = 1e9;
    c.slot_duration = 0.1;
    c.task_cycles = 2.5e7;
    const auto cfg = validate_config(c);
    Action a = Action::idle(1, 1);
    EXPECT_EQ(dynamics::computing_rates(cfg, a)[0], 0);
    a.cores[0] = 1;
    EXPECT_EQ(dynamics::computing_rates(cfg, a)[0], 4);
    a.cores[0] = 2;
    EXPECT_EQ(dynamics::computing_rates(cfg, a)[0], 8);
}

TEST(Step, TandemRecursion) {
    const auto cfg = validate_config(unit_snr_link());  // r = 2, a = 1 every slot
    auto s = backlog(cfg, 5, 0);
    const auto rec = dynamics::step(s, send(1, 1, 0, 0, 0.1), cfg, 1);
    EXPECT_EQ(rec.tx_rate[0], 2);
    EXPECT_EQ(rec.uplinked[0], 2);
    EXPECT_EQ(s.q(0), 4);
    EXPECT_EQ(s.k(0, 0), 2);
    EXPECT_EQ(check_coherence(s), "");
}

TEST(Step, ConservationAmendment) {
    ScenarioConfig c = unit_snr_link();
    c.task_size_bits = 2.5e4;  // r = 4
    c.arrival_kind = ArrivalKind::Poisson;
    c.arrival_rates = {3.0};
    // Pick a seed whose first draw is exactly 3 arrivals.
    std::uint64_t seed = 0;
    const auto probe = validate_config(c);
    while (dynamics::draw_arrivals(probe, 0, seed)[0] != 3) ++seed;
    c.rng_seed = seed;
    const auto cfg = validate_config(c);
    auto s = backlog(cfg, 1, 0);
    const auto rec = dynamics::step(s, send(1, 1, 0, 0, 0.1), cfg, seed);
    EXPECT_EQ(rec.tx_rate[0], 4);
    EXPECT_EQ(rec.arrivals[0], 3);
    EXPECT_EQ(s.q(0), 3);
    EXPECT_EQ(s.k(0, 0), 1);
}

TEST(Step, CannotServeAbsentTasks) {
    ScenarioConfig c = scenario(1, 1, 0.0, 3);
    c.core_speed_hz = 1e9;
    c.task_cycles = 2e7;  // 5 per core
    const auto cfg = validate_config(c);
    auto s = backlog(cfg, 0, 2);
    Action a = Action::idle(1, 1);
    a.cores[0] = 1;
    const auto rec = dynamics::step(s, a, cfg, 1);
    EXPECT_EQ(rec.comp_rate[0], 5);
    EXPECT_EQ(rec.completions[0], 2);
    EXPECT_EQ(s.k(0, 0), 0);
    EXPECT_EQ(s.counts.completions, 2);
}

TEST(Step, NoTransmitAndComputeInSameSlot) {
    const auto cfg = validate_config(unit_snr_link());
    auto s = backlog(cfg, 2, 0);
    Action a = send(1, 1, 0, 0, 0.1);
    a.cores[0] = 1;
    const auto rec = dynamics::step(s, a, cfg, 1);
    EXPECT_EQ(rec.completions[0], 0);
    EXPECT_EQ(s.k(0, 0), 2);
}

TEST(Step, RejectsInvalidAction) {
    const auto cfg = validate_config(scenario(1, 1));
    SystemState s(cfg);
    Action a = Action::idle(1, 1);
    a.cores[0] = 9;
    EXPECT_THROW(dynamics::step(s, a, cfg, 1), ActionInvalid);
}

TEST(Step, DeadlineBoundsLatency) {
    ScenarioConfig c = scenario(1, 1, 1.0, 0);
    c.deadline_slots = 3;
    const auto cfg = validate_config(c);
    SystemState s(cfg);
    // Nothing is ever served: each task is dropped once it could no longer
    // finish within 3 slots.
    for (int t = 0; t < 10; ++t) dynamics::step(s, Action::idle(1, 1), cfg, 1);
    for (const auto& e : s.ledger) {
        if (e.location == Location::Dropped) {
            EXPECT_EQ(e.reason, DropReason::Deadline);
            EXPECT_EQ(e.event_slot + 1 - e.born_slot, 4);
        }
    }
    EXPECT_EQ(s.q(0), 3);
    EXPECT_EQ(s.counts.drops_deadline, 7);
}

TEST(Step, OverflowCaps) {
    ScenarioConfig c = scenario(1, 1, 1.0, 0);
    c.queue_caps = {2, 0};
    const auto cfg = validate_config(c);
    SystemState s(cfg);
    for (int t = 0; t < 5; ++t) dynamics::step(s, Action::idle(1, 1), cfg, 1);
    EXPECT_EQ(s.q(0), 2);
    EXPECT_EQ(s.counts.drops_overflow, 3);
}

TEST(Step, LocalAdmissionAndEnergy) {
    ScenarioConfig c = scenario(1, 1, 1.0, 0);
    c.local_compute = LocalCompute{1e9, 1e-27};
    c.task_cycles = 1e8;  // one local task per slot
    const auto cfg = validate_config(c);
    ASSERT_EQ(cfg.local_rate(), 1);
    SystemState s(cfg);
    Action a = Action::idle(1, 1);
    a.local_admit[0] = kAdmitAll;
    auto rec = dynamics::step(s, a, cfg, 1);
    EXPECT_EQ(s.local(0), 1);
    EXPECT_EQ(rec.energy[0], 0.0);
    rec = dynamics::step(s, a, cfg, 1);
    EXPECT_EQ(rec.local_completions[0], 1);
    // kappa f^3 tau = 1e-27 * 1e27 * 0.1
    EXPECT_NEAR(rec.energy[0], 0.1, 1e-12);
}

TEST(Step, TransmitEnergy) {
    const auto cfg = validate_config(unit_snr_link());
    auto s = backlog(cfg, 3, 0);
    const auto rec = dynamics::step(s, send(1, 1, 0, 0, 0.1), cfg, 1);
    EXPECT_NEAR(rec.energy[0], 0.1 * 0.1, 1e-15);
    EXPECT_NEAR(s.energy_md[0], 0.01, 1e-15);
}

TEST(DynamicsProperties, ConservationCoherenceFifo) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const ScenarioConfig c = with_random_policy(test_util::random_scenario(rng, 4, 3), rng);
        const auto cfg = validate_config(c);
        SystemState s(cfg);
        const auto decide = random_policy(cfg);
        double last_energy = 0.0;
        for (int t = 0; t < 300; ++t) {
            const auto rec = dynamics::step(s, decide(s), cfg, c.rng_seed);
            const auto& n = rec.cumulative;
            ASSERT_EQ(n.arrivals, n.completions + n.drops_deadline + n.drops_overflow + rec.residual)
                << "trial " << trial << " slot " << t;
            double energy = 0.0;
            for (double e : s.energy_md) energy += e;
            ASSERT_GE(energy, last_energy);
            last_energy = energy;
        }
        ASSERT_EQ(check_coherence(s), "") << "trial " << trial;

        // Per MD, tasks complete in birth order at the same ES when no
        // migration can reorder them.
        if (c.backhaul_links.empty()) {
            std::map<std::pair<int, int>, std::vector<const TaskEntry*>> done;
            for (const auto& e : s.ledger) {
                if (e.location == Location::Completed && e.es >= 0) done[{e.owner_md, e.es}].push_back(&e);
            }
            for (auto& [key, v] : done) {
                std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->id < b->id; });
                for (std::size_t i = 1; i < v.size(); ++i) {
                    ASSERT_LE(v[i - 1]->event_slot, v[i]->event_slot);
                }
            }
        }
    }
}

TEST(DynamicsProperties, ZeroPowerMeansZeroEnergy) {
    ScenarioConfig c = scenario(3, 2, 0.5);
    c.power_levels = {0.0};
    c.policy.kind = PolicyKind::Backpressure;
    c.horizon = 200;
    const auto r = experiment::run_scenario(validate_config(c));
    EXPECT_EQ(r.summary.energy_total, 0.0);
    EXPECT_EQ(r.summary.completions, 0);
}

TEST(DynamicsProperties, BitIdenticalReruns) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const ScenarioConfig c = with_random_policy(test_util::random_scenario(rng, 4, 3), rng);
        const auto cfg = validate_config(c);
        auto trace = [&] {
            std::vector<dynamics::SlotRecord> recs;
            SystemState s(cfg);
            const auto decide = random_policy(cfg);
            for (int t = 0; t < 200; ++t) recs.push_back(dynamics::step(s, decide(s), cfg, c.rng_seed));
            return recs;
        };
        const auto a = trace();
        const auto b = trace();
        for (std::size_t t = 0; t < a.size(); ++t) {
            ASSERT_EQ(a[t].action, b[t].action);
            ASSERT_EQ(a[t].q, b[t].q);
            ASSERT_EQ(a[t].k, b[t].k);
            ASSERT_EQ(a[t].channel, b[t].channel);
            ASSERT_EQ(a[t].energy, b[t].energy);
        }
    }
}

TEST(Trajectory, NoArrivals) {
    ScenarioConfig c = scenario(3, 2, 0.0);
    c.horizon = 100;
    const auto r = experiment::run_scenario(validate_config(c));
    EXPECT_EQ(r.summary.throughput, 0.0);
    EXPECT_EQ(r.summary.energy_total, 0.0);
    EXPECT_EQ(r.summary.drops(), 0);
    EXPECT_EQ(r.summary.completion_ratio, 1.0);
}

TEST(Trajectory, ZeroHorizon) {
    ScenarioConfig c = scenario(2, 1);
    c.horizon = 0;
    const auto r = experiment::run_scenario(validate_config(c));
    EXPECT_EQ(r.summary.slots, 0);
    EXPECT_EQ(r.summary.arrivals, 0);
    EXPECT_EQ(r.summary.throughput, 0.0);
}

TEST(Trajectory, StableSingleLinkCompletesEverything) {
    ScenarioConfig c = unit_snr_link();  // r = 2
    c.arrival_rates = {0.3};
    c.cores_per_es = {1};
    c.core_speed_hz = 1e9;
    c.task_cycles = 1e8;  // c = 1
    c.horizon = 100000;
    const auto r = experiment::run_scenario(validate_config(c));
    EXPECT_NEAR(r.summary.completion_ratio, 1.0, 1e-3);
    EXPECT_LE(r.summary.residual, 10);
}

TEST(Trajectory, LittlesLaw) {
    ScenarioConfig c = unit_snr_link();
    c.task_size_bits = 1e5;  // r = 1
    c.arrival_rates = {0.6};
    c.cores_per_es = {1};
    c.core_speed_hz = 1e9;
    c.task_cycles = 1e8;
    c.horizon = 100000;
    c.policy.kind = PolicyKind::Backpressure;
    const auto s = experiment::run_scenario(validate_config(c)).summary;
    const double little = (s.mean_q_total + s.mean_k_total) / s.throughput;
    EXPECT_NEAR(s.mean_latency / little, 1.0, 0.05);
}
