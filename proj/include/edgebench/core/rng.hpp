#pragma once

#include <cstdint>
#include <limits>

namespace edgebench {

/// Purposes keep the random streams of different subsystems disjoint.
enum class StreamPurpose : std::uint64_t {
    Placement = 1,
    Arrivals = 2,
    Channel = 3,
    Policy = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: the stream is a pure function of
/// (seed, purpose, slot, index), so no generator state is carried between
/// slots and any slot can be replayed in isolation.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t slot,
              std::uint64_t index) noexcept {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
        h = splitmix64(h ^ slot);
        h = splitmix64(h ^ (index * 0xd1342543de82ef95ULL));
        state_ = h;
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

private:
    std::uint64_t state_;
};

} // namespace edgebench
