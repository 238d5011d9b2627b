#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mdim {

inline constexpr const char* kVersion = "mdim 0.1.0";

struct ExperimentConfig {
    std::string experiment;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 0;     // 0 = library default
    bool bits = false;   // display rates in bits alongside nats
    std::map<std::string, std::string> params; // experiment-specific overrides

    std::string digest_string() const;
};

struct RunManifest {
    std::string experiment;
    std::string config_digest;
    std::vector<std::string> files; // relative to out_dir
    double wall_ms = 0.0;
    std::string version = kVersion;

    std::string to_json() const;
};

struct ExperimentInfo {
    std::string name;
    std::string anchor;  // section anchor of the statement it reproduces
    std::string summary;
};

/// Stable-ordered experiment registry.
const std::vector<ExperimentInfo>& list_registry();
std::string registry_json();

/// Run one experiment; emits counts CSV, estimate JSON, and a gnuplot script
/// per curve under config.out_dir, plus manifest.json. Deterministic given
/// config + seed. Throws config_error for unknown experiments or invalid
/// ladders, budget_error / precision_error as applicable.
RunManifest run_experiment(const ExperimentConfig& config);

/// Parse a plain-text key/value config file ("key = value", '#' comments).
ExperimentConfig parse_config_file(const std::filesystem::path& file);
void apply_param(ExperimentConfig& config, const std::string& key, const std::string& value);

} // namespace mdim
