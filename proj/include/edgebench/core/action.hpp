#pragma once

#include <edgebench/core/config.hpp>
#include <edgebench/core/state.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace edgebench {

inline constexpr int kUnassociated = -1;
inline constexpr std::int64_t kAdmitAll = std::numeric_limits<std::int64_t>::max();

struct Migration {
    int from_es = 0;
    int to_es = 0;
    int md = 0;
    std::int64_t count = 0;

    friend bool operator==(const Migration&, const Migration&) = default;
};

/// One slot of control. The association matrix is stored as one ES index
/// per MD, which encodes sum_j eta_ij <= 1 structurally.
struct Action {
    std::vector<double> power;
    std::vector<int> assoc;
    // cores[link(md, es)]: cores of `es` serving the queue of `md`.
    std::vector<int> cores;
    // Number of this slot's arrivals each MD sends to its local queue.
    std::vector<std::int64_t> local_admit;
    std::vector<Migration> migrate;

    /// All-idle action for the given dimensions.
    static Action idle(int num_mds, int num_ess);

    int eta(int md, int es) const noexcept { return assoc[md] == es ? 1 : 0; }

    friend bool operator==(const Action&, const Action&) = default;
};

/// Empty string when the action satisfies every invariant against the
/// pre-step state, otherwise the first violation.
std::string action_violation(const Action& action, const SystemState& state,
                             const ValidatedConfig& cfg);

/// Throws ActionInvalid carrying the state's slot.
void require_valid_action(const Action& action, const SystemState& state,
                          const ValidatedConfig& cfg);

} // namespace edgebench
