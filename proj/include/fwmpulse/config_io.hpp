#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "fwmpulse/sweep.hpp"

namespace fwm {

// Full CLI run configuration: model scenario plus the optional sweep and
// calibrate sections. Parsing is strict: unknown keys are rejected and
// every error names the offending field path.
struct RunConfig {
    sweep::Scenario scenario;
    bool has_seed = false; // chain.rng_seed was given explicitly

    bool has_sweep = false;
    sweep::Target sweep_target = sweep::Target::TimeResolvedVariance;
    std::string sweep_parameter; // internal path, e.g. "medium.delta"
    std::vector<double> sweep_grid;

    double calibrate_target = 4.2;
};

RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& config, const std::string& path);

nlohmann::ordered_json scenario_to_json(const sweep::Scenario& scenario);
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// Builds a SweepSpec from the config's sweep section; throws ConfigError
// if the section is absent.
sweep::SweepSpec make_sweep_spec(const RunConfig& config);

// FNV-1a over the canonical JSON serialization of the scenario.
std::uint64_t config_hash(const sweep::Scenario& scenario);
std::uint64_t fnv1a64(const std::string& text);

} // namespace fwm
