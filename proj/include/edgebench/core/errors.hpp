#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace edgebench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scenario value violates an invariant. `field()` holds a JSON-style path
/// such as `$.arrival_rates[0]`.
class MalformedConfig : public Error {
public:
    MalformedConfig(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A per-MD or per-ES list does not have U or J entries.
class InconsistentDimensions : public MalformedConfig {
public:
    using MalformedConfig::MalformedConfig;
};

class ActionInvalid : public Error {
public:
    ActionInvalid(std::int64_t slot, const std::string& what)
        : Error("slot " + std::to_string(slot) + ": " + what), slot_(slot) {}

    std::int64_t slot() const noexcept { return slot_; }

private:
    std::int64_t slot_;
};

class StateSpaceTooLarge : public Error {
public:
    StateSpaceTooLarge(const std::string& what_space, double count, double cap)
        : Error(what_space + " has " + format_count(count) + " elements, cap is " +
                format_count(cap)),
          count_(count), cap_(cap) {}

    double count() const noexcept { return count_; }
    double cap() const noexcept { return cap_; }

private:
    static std::string format_count(double v);

    double count_;
    double cap_;
};

class OracleTooLarge : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class SpecMismatch : public Error {
public:
    using Error::Error;
};

class LocalComputeDisabled : public Error {
public:
    LocalComputeDisabled() : Error("local computing is not configured for this scenario") {}
};

class IncompatibleRuns : public Error {
public:
    using Error::Error;
};

} // namespace edgebench
