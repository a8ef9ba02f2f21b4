#include <edgebench/core/rng.hpp>

namespace edgebench {

std::uint64_t StreamRng::below(std::uint64_t n) noexcept {
    // Rejection on the top of the range removes modulo bias.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return x % n;
}

} // namespace edgebench
