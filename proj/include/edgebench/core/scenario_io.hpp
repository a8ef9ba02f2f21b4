#pragma once

#include <edgebench/core/config.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string_view>

namespace edgebench {

/// Strict parse: keys must match ScenarioConfig field names, unknown keys
/// raise MalformedConfig naming the offending path. Scalars are accepted
/// for arrival_rates and cores_per_es and broadcast to U or J entries.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

nlohmann::json policy_to_json(const PolicySpec& policy);
PolicySpec policy_from_json(const nlohmann::json& j, const std::string& path);

class FileNotFound : public Error {
public:
    explicit FileNotFound(const std::filesystem::path& p)
        : Error("cannot open " + p.string()), path_(p) {}
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Reads and parses a scenario file. A relative policy_file is resolved
/// against the scenario's directory. Throws FileNotFound or MalformedConfig.
ScenarioConfig load_scenario(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace edgebench
