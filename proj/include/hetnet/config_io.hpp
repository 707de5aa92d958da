#ifndef HETNET_CONFIG_IO_HPP
#define HETNET_CONFIG_IO_HPP

#include "hetnet/network_model.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/ppp_simulator.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

/// Raised for unreadable, malformed or invalid scenario files. `path()` is the
/// JSON field path of the offending value, e.g. "tiers[1].density".
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path))
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class SweepMode
{
    Joint,
    EqualFractions,
    MaxSirSpectrumOnly,
    BruteForce,
    JointHigherLoad
};

std::string to_string(SweepMode mode);
/// Accepts joint, equal_fractions, maxsir, brute_force, joint_hl.
SweepMode parse_sweep_mode(const std::string& name);

struct SweepSpec
{
    /// Empty: every tier's threshold is set to the swept value. Otherwise only
    /// that (0-based) tier's.
    std::optional<std::size_t> tier;
    std::vector<double> values; // bits/s, strictly increasing
    std::vector<SweepMode> modes;

    void validate(std::size_t num_tiers) const;
};

struct Scenario
{
    NetworkConfig network;
    std::optional<SweepSpec> sweep;
    SolveOptions solver;
    std::optional<SimConfig> simulation;
};

/// Parses and validates a scenario document. Unknown keys are rejected.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads `path` and parses it with parse_scenario.
Scenario load_config(const std::string& path);

/// Canonical JSON form of a network (the part that determines results).
nlohmann::json to_json(const NetworkConfig& config);

/// 64-bit FNV-1a of the canonical network JSON, as 16 hex digits.
std::string config_hash(const NetworkConfig& config);

} // namespace hetnet

#endif // HETNET_CONFIG_IO_HPP
