#include <edgebench/mdp/model.hpp>

#include <edgebench/core/scenario_io.hpp>
#include <edgebench/dynamics/dynamics.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace edgebench::mdp {

namespace {

// Memory guard for the materialised kernel.
constexpr double kMaxPairs = 5e7;
constexpr std::size_t kMaxTransitions = 100'000'000;

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw MalformedConfig(field, what);
}

void enumerate_splits(int md, int left, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
    if (md == static_cast<int>(cur.size())) {
        out.push_back(cur);
        return;
    }
    for (int c = 0; c <= left; ++c) {
        cur[md] = c;
        enumerate_splits(md + 1, left - c, cur, out);
    }
    cur[md] = 0;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

std::uint64_t mdp_spec_hash(std::uint64_t config_hash, const MdpParams& p) {
    return fnv1a64(fmt::format("{}:{}:{}:{}:{}:{}", config_hash, p.q_max, p.k_max, p.gamma,
                               p.epsilon, p.reward_kind == RewardKind::Completions ? 0 : 1));
}

MdpSpec::MdpSpec(ValidatedConfig base, MdpParams params)
    : base_(std::move(base)), params_(params), hash_(0) {
    const auto& raw = base_.raw();
    require(raw.arrival_kind == ArrivalKind::Bernoulli, "$.arrival_kind",
            "the MDP model needs Bernoulli arrivals");
    require(raw.deadline_slots == 0, "$.deadline_slots", "the MDP model has no deadlines");
    require(!raw.local_compute, "$.local_compute", "the MDP model has no local computing");
    require(raw.backhaul_links.empty(), "$.backhaul_links", "the MDP model has no backhaul");
    require(params_.q_max >= 1, "$.policy_params.q_max", "truncation cap must be >= 1");
    require(params_.k_max >= 1, "$.policy_params.k_max", "truncation cap must be >= 1");
    require(params_.gamma > 0.0 && params_.gamma < 1.0, "$.policy_params.gamma",
            "must lie in (0, 1)");
    require(params_.epsilon > 0.0, "$.policy_params.epsilon", "must be positive");
    hash_ = mdp_spec_hash(base_.model_hash(), params_);
}

double StateSpace::count(int U, int J, int q_max, int k_max, int C) {
    const double links = static_cast<double>(U) * J;
    return std::pow(q_max + 1.0, U) * std::pow(k_max + 1.0, links) * std::pow(C, links);
}

StateSpace::StateSpace(int U, int J, int q_max, int k_max, int C, double cap)
    : num_mds_(U), num_ess_(J), q_max_(q_max), k_max_(k_max), channels_(C), size_(0) {
    const double n = count(U, J, q_max, k_max, C);
    if (n > cap) {
        throw StateSpaceTooLarge("MDP state space", n, cap);
    }
    size_ = static_cast<std::size_t>(std::llround(n));
}

std::size_t StateSpace::encode(std::span<const int> q, std::span<const int> k,
                               std::span<const int> channel) const {
    std::size_t idx = 0;
    std::size_t scale = 1;
    for (int i = 0; i < num_mds_; ++i) {
        idx += scale * static_cast<std::size_t>(q[i]);
        scale *= static_cast<std::size_t>(q_max_ + 1);
    }
    for (int l = 0; l < num_links(); ++l) {
        idx += scale * static_cast<std::size_t>(k[l]);
        scale *= static_cast<std::size_t>(k_max_ + 1);
    }
    for (int l = 0; l < num_links(); ++l) {
        idx += scale * static_cast<std::size_t>(channel[l]);
        scale *= static_cast<std::size_t>(channels_);
    }
    return idx;
}

StateSpace::Point StateSpace::decode(std::size_t idx) const {
    Point p;
    p.q.resize(num_mds_);
    p.k.resize(num_links());
    p.channel.resize(num_links());
    for (int i = 0; i < num_mds_; ++i) {
        p.q[i] = static_cast<int>(idx % (q_max_ + 1));
        idx /= (q_max_ + 1);
    }
    for (int l = 0; l < num_links(); ++l) {
        p.k[l] = static_cast<int>(idx % (k_max_ + 1));
        idx /= (k_max_ + 1);
    }
    for (int l = 0; l < num_links(); ++l) {
        p.channel[l] = static_cast<int>(idx % channels_);
        idx /= channels_;
    }
    return p;
}

std::size_t StateSpace::channel_index(std::span<const int> channel) const {
    std::size_t idx = 0;
    std::size_t scale = 1;
    for (int l = 0; l < num_links(); ++l) {
        idx += scale * static_cast<std::size_t>(channel[l]);
        scale *= static_cast<std::size_t>(channels_);
    }
    return idx;
}

double ActionSpace::count(const ValidatedConfig& cfg) {
    const int U = cfg.num_mds();
    const int J = cfg.num_ess();
    const double options = 1.0 + J * (static_cast<double>(cfg.raw().power_levels.size()) - 1.0);
    double n = std::pow(options, U);
    for (int j = 0; j < J; ++j) {
        // Splits of at most M cores over U MDs.
        n *= binomial(cfg.cores(j) + U, U);
    }
    return n;
}

ActionSpace::ActionSpace(const ValidatedConfig& cfg, double cap)
    : num_mds_(cfg.num_mds()),
      num_ess_(cfg.num_ess()),
      power_levels_(cfg.raw().power_levels),
      md_options_(1 + cfg.num_ess() * (static_cast<int>(cfg.raw().power_levels.size()) - 1)),
      size_(0) {
    const double n = count(cfg);
    if (n > cap) {
        throw StateSpaceTooLarge("MDP action space", n, cap);
    }
    splits_.resize(num_ess_);
    for (int j = 0; j < num_ess_; ++j) {
        std::vector<int> cur(num_mds_, 0);
        enumerate_splits(0, cfg.cores(j), cur, splits_[j]);
    }
    size_ = static_cast<std::size_t>(std::llround(n));
}

Action ActionSpace::decode(std::size_t idx) const {
    Action a = Action::idle(num_mds_, num_ess_);
    const int positive = static_cast<int>(power_levels_.size()) - 1;
    for (int i = 0; i < num_mds_; ++i) {
        const int opt = static_cast<int>(idx % md_options_);
        idx /= md_options_;
        if (opt > 0) {
            a.assoc[i] = (opt - 1) / positive;
            a.power[i] = power_levels_[(opt - 1) % positive + 1];
        }
    }
    for (int j = 0; j < num_ess_; ++j) {
        const auto& split = splits_[j][idx % splits_[j].size()];
        idx /= splits_[j].size();
        for (int i = 0; i < num_mds_; ++i) {
            a.cores[static_cast<std::size_t>(i) * num_ess_ + j] = split[i];
        }
    }
    return a;
}

StateSpace enumerate_states(const MdpSpec& spec) {
    const auto& cfg = spec.base();
    return StateSpace(cfg.num_mds(), cfg.num_ess(), spec.params().q_max, spec.params().k_max,
                      static_cast<int>(cfg.raw().channel_states.size()), spec.params().state_cap);
}

TransitionModel build_transition_model(const MdpSpec& spec) { return TransitionModel(spec); }

TransitionModel::TransitionModel(const MdpSpec& spec)
    : spec_(&spec),
      states_(enumerate_states(spec)),
      actions_(spec.base(), spec.params().action_cap) {
    const auto& cfg = spec.base();
    const auto& raw = cfg.raw();
    const int U = cfg.num_mds();
    const int L = static_cast<int>(cfg.num_links());
    const int C = states_.channel_states();
    const int q_max = spec.params().q_max;
    const int k_max = spec.params().k_max;
    const bool admitted_reward = spec.params().reward_kind == RewardKind::AdmittedThroughput;

    const std::size_t S = states_.size();
    const std::size_t A = actions_.size();
    if (static_cast<double>(S) * static_cast<double>(A) > kMaxPairs) {
        throw StateSpaceTooLarge("MDP (state, action) table",
                                 static_cast<double>(S) * static_cast<double>(A), kMaxPairs);
    }

    std::vector<Action> decoded(A);
    std::vector<std::vector<std::int64_t>> comp(A);
    for (std::size_t a = 0; a < A; ++a) {
        decoded[a] = actions_.decode(a);
        comp[a] = dynamics::computing_rates(cfg, decoded[a]);
    }

    // Every joint channel vector with its digits.
    std::size_t channel_combos = 1;
    for (int l = 0; l < L; ++l) channel_combos *= static_cast<std::size_t>(C);
    std::vector<std::vector<int>> channel_vec(channel_combos, std::vector<int>(L));
    for (std::size_t c = 0; c < channel_combos; ++c) {
        std::size_t x = c;
        for (int l = 0; l < L; ++l) {
            channel_vec[c][l] = static_cast<int>(x % C);
            x /= C;
        }
    }
    // Transition probabilities between joint channel vectors, non-zero only.
    std::vector<std::vector<std::pair<std::size_t, double>>> channel_next(channel_combos);
    for (std::size_t from = 0; from < channel_combos; ++from) {
        for (std::size_t to = 0; to < channel_combos; ++to) {
            double p = 1.0;
            for (int l = 0; l < L && p > 0.0; ++l) {
                p *= raw.channel_transition[channel_vec[from][l]][channel_vec[to][l]];
            }
            if (p > 0.0) channel_next[from].emplace_back(to, p);
        }
    }
    // Rates of every action under every joint channel vector.
    std::vector<std::vector<std::int64_t>> rates(A * channel_combos);
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t c = 0; c < channel_combos; ++c) {
            rates[a * channel_combos + c] =
                dynamics::transmission_rates(cfg, channel_vec[c], decoded[a]);
        }
    }
    // Arrival patterns with probabilities.
    std::vector<std::pair<std::vector<int>, double>> arrivals;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << U); ++mask) {
        std::vector<int> pattern(U);
        double p = 1.0;
        for (int i = 0; i < U; ++i) {
            pattern[i] = static_cast<int>((mask >> i) & 1U);
            p *= pattern[i] ? raw.arrival_rates[i] : 1.0 - raw.arrival_rates[i];
        }
        if (p > 0.0) arrivals.emplace_back(std::move(pattern), p);
    }

    kernel_.num_states = S;
    kernel_.num_actions = A;
    kernel_.row_ptr.reserve(S * A + 1);
    kernel_.reward.reserve(S * A);
    overflow_.reserve(S * A);

    std::vector<Transition> succ;
    std::vector<int> q(U), k(L), q_next(U), k_next(L);
    for (std::size_t s = 0; s < S; ++s) {
        const auto point = states_.decode(s);
        const std::size_t ch_now = states_.channel_index(point.channel);
        for (std::size_t a = 0; a < A; ++a) {
            const Action& act = decoded[a];
            double reward = 0.0;
            for (int l = 0; l < L; ++l) {
                const auto served = std::min<std::int64_t>(point.k[l], comp[a][l]);
                k[l] = point.k[l] - static_cast<int>(served);
                if (!admitted_reward) reward += static_cast<double>(served);
            }
            succ.clear();
            double overflow = 0.0;
            for (const auto& [ch_to, p_ch] : channel_next[ch_now]) {
                const auto& r = rates[a * channel_combos + ch_to];
                k_next = k;
                double dropped = 0.0;
                for (int i = 0; i < U; ++i) {
                    const auto up = std::min<std::int64_t>(point.q[i], r[i]);
                    q[i] = point.q[i] - static_cast<int>(up);
                    if (act.assoc[i] != kUnassociated && up > 0) {
                        int& dst = k_next[static_cast<std::size_t>(i) * cfg.num_ess() + act.assoc[i]];
                        dst += static_cast<int>(up);
                        if (dst > k_max) {
                            dropped += dst - k_max;
                            dst = k_max;
                        }
                    }
                }
                for (const auto& [pattern, p_arr] : arrivals) {
                    double admitted = 0.0;
                    double lost = dropped;
                    for (int i = 0; i < U; ++i) {
                        q_next[i] = q[i] + pattern[i];
                        if (q_next[i] > q_max) {
                            lost += q_next[i] - q_max;
                            q_next[i] = q_max;
                        } else {
                            admitted += pattern[i];
                        }
                    }
                    const double p = p_ch * p_arr;
                    const auto next = states_.encode(q_next, k_next, channel_vec[ch_to]);
                    succ.push_back({static_cast<std::uint32_t>(next), p});
                    overflow += p * lost;
                    if (admitted_reward) reward += p * admitted;
                }
            }
            std::sort(succ.begin(), succ.end(),
                      [](const Transition& x, const Transition& y) { return x.next < y.next; });
            std::size_t w = 0;
            for (std::size_t r = 0; r < succ.size(); ++r) {
                if (w > 0 && succ[w - 1].next == succ[r].next) {
                    succ[w - 1].prob += succ[r].prob;
                } else {
                    succ[w++] = succ[r];
                }
            }
            succ.resize(w);
            if (kernel_.transitions.size() + succ.size() > kMaxTransitions) {
                throw StateSpaceTooLarge("MDP transition kernel",
                                         static_cast<double>(kernel_.transitions.size() +
                                                             succ.size()),
                                         static_cast<double>(kMaxTransitions));
            }
            kernel_.push_row(succ, reward);
            overflow_.push_back(overflow);
        }
    }
}

} // namespace edgebench::mdp
