#include <edgebench/core/errors.hpp>

#include <cmath>
#include <cstdio>

namespace edgebench {

std::string StateSpaceTooLarge::format_count(double v) {
    char buf[64];
    if (v < 1e15 && std::floor(v) == v) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.3e", v);
    }
    return buf;
}

} // namespace edgebench
