#include "hetnet/config_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hetnet {

namespace {

using nlohmann::json;

// Splits "field.path: message" from the validators into a ConfigError.
ConfigError from_validation(const std::invalid_argument& e)
{
    const std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon == std::string::npos)
        return ConfigError("", what);
    return ConfigError(what.substr(0, colon), what.substr(colon + 2));
}

std::string join(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed)
{
    if (!obj.is_object())
        throw ConfigError(path, "expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(join(path, key), "unknown field");
}

const json& required(const json& obj, const std::string& path, const std::string& key)
{
    if (!obj.contains(key))
        throw ConfigError(join(path, key), "missing required field");
    return obj.at(key);
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw ConfigError(path, "expected a number");
    return v.get<double>();
}

double positive(const json& v, const std::string& path)
{
    const double x = number(v, path);
    if (!(x > 0.0) || !std::isfinite(x))
        throw ConfigError(path, "must be > 0");
    return x;
}

std::int64_t integer(const json& v, const std::string& path)
{
    if (!v.is_number_integer())
        throw ConfigError(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::string text(const json& v, const std::string& path)
{
    if (!v.is_string())
        throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

TierParams parse_tier(const json& t, const std::string& path)
{
    reject_unknown(t, path, {"power_dbm", "density", "bias", "rate_threshold"});
    TierParams tier;
    tier.power_dbm = number(required(t, path, "power_dbm"), join(path, "power_dbm"));
    tier.density = positive(required(t, path, "density"), join(path, "density"));
    tier.rate_threshold = positive(required(t, path, "rate_threshold"), join(path, "rate_threshold"));
    if (t.contains("bias"))
        tier.bias = positive(t.at("bias"), join(path, "bias"));
    return tier;
}

SweepSpec parse_sweep(const json& s, std::size_t num_tiers)
{
    const std::string path = "sweep";
    reject_unknown(s, path, {"variable", "tier", "values", "modes"});
    SweepSpec spec;

    const std::string variable =
        s.contains("variable") ? text(s.at("variable"), "sweep.variable") : "all_tiers";
    if (variable == "one_tier") {
        const auto tier = integer(required(s, path, "tier"), "sweep.tier");
        if (tier < 0 || static_cast<std::size_t>(tier) >= num_tiers)
            throw ConfigError("sweep.tier", "tier index out of range");
        spec.tier = static_cast<std::size_t>(tier);
    } else if (variable == "all_tiers") {
        if (s.contains("tier"))
            throw ConfigError("sweep.tier", "only allowed with variable \"one_tier\"");
    } else {
        throw ConfigError("sweep.variable", "expected \"all_tiers\" or \"one_tier\"");
    }

    const json& values = required(s, path, "values");
    if (!values.is_array())
        throw ConfigError("sweep.values", "expected an array");
    for (std::size_t i = 0; i < values.size(); ++i)
        spec.values.push_back(positive(values[i], "sweep.values[" + std::to_string(i) + "]"));

    const json& modes = required(s, path, "modes");
    if (!modes.is_array())
        throw ConfigError("sweep.modes", "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string p = "sweep.modes[" + std::to_string(i) + "]";
        try {
            spec.modes.push_back(parse_sweep_mode(text(modes[i], p)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(p, e.what());
        }
    }
    try {
        spec.validate(num_tiers);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep", e.what());
    }
    return spec;
}

SolveOptions parse_solver(const json& s)
{
    reject_unknown(s, "solver", {"tolerance", "max_iterations", "restarts", "grid_step", "seed"});
    SolveOptions o;
    if (s.contains("tolerance"))
        o.tolerance = positive(s.at("tolerance"), "solver.tolerance");
    if (s.contains("max_iterations"))
        o.max_iterations = static_cast<int>(integer(s.at("max_iterations"), "solver.max_iterations"));
    if (s.contains("restarts"))
        o.restarts = static_cast<int>(integer(s.at("restarts"), "solver.restarts"));
    if (s.contains("grid_step"))
        o.grid_step = positive(s.at("grid_step"), "solver.grid_step");
    if (s.contains("seed"))
        o.seed = static_cast<std::uint64_t>(integer(s.at("seed"), "solver.seed"));
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        throw from_validation(e);
    }
    return o;
}

SimConfig parse_simulation(const json& s, const NetworkConfig& network)
{
    reject_unknown(s, "simulation", {"window_radius", "num_drops", "seed", "load_mode"});
    SimConfig sim;
    if (s.contains("window_radius"))
        sim.window_radius = positive(s.at("window_radius"), "simulation.window_radius");
    if (s.contains("num_drops")) {
        sim.num_drops = integer(s.at("num_drops"), "simulation.num_drops");
        if (sim.num_drops <= 0)
            throw ConfigError("simulation.num_drops", "must be > 0");
    }
    if (s.contains("seed"))
        sim.seed = static_cast<std::uint64_t>(integer(s.at("seed"), "simulation.seed"));
    if (s.contains("load_mode")) {
        const auto mode = text(s.at("load_mode"), "simulation.load_mode");
        if (mode == "analytic_average")
            sim.load_mode = SimLoadMode::AnalyticAverage;
        else if (mode == "actual_count")
            sim.load_mode = SimLoadMode::ActualCount;
        else
            throw ConfigError("simulation.load_mode",
                              "expected \"analytic_average\" or \"actual_count\"");
    }
    try {
        sim.validate(network);
    } catch (const std::invalid_argument& e) {
        throw from_validation(e);
    }
    return sim;
}

} // namespace

std::string to_string(SweepMode mode)
{
    switch (mode) {
    case SweepMode::Joint: return "joint";
    case SweepMode::EqualFractions: return "equal_fractions";
    case SweepMode::MaxSirSpectrumOnly: return "maxsir";
    case SweepMode::BruteForce: return "brute_force";
    case SweepMode::JointHigherLoad: return "joint_hl";
    }
    return "unknown";
}

SweepMode parse_sweep_mode(const std::string& name)
{
    for (auto m : {SweepMode::Joint, SweepMode::EqualFractions, SweepMode::MaxSirSpectrumOnly,
                   SweepMode::BruteForce, SweepMode::JointHigherLoad})
        if (to_string(m) == name)
            return m;
    throw std::invalid_argument("unknown mode \"" + name
                                + "\" (expected joint, equal_fractions, maxsir, brute_force, joint_hl)");
}

void SweepSpec::validate(std::size_t num_tiers) const
{
    if (tier && *tier >= num_tiers)
        throw std::invalid_argument("tier index out of range");
    if (values.empty())
        throw std::invalid_argument("values: must not be empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("values: must be positive");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw std::invalid_argument("values: must be strictly increasing");
    }
    if (modes.empty())
        throw std::invalid_argument("modes: must not be empty");
}

Scenario parse_scenario(const json& doc)
{
    reject_unknown(doc, "", {"tiers", "user_density", "bandwidth", "path_loss_exponent", "sweep",
                             "solver", "simulation"});
    Scenario sc;
    const json& tiers = required(doc, "", "tiers");
    if (!tiers.is_array() || tiers.empty())
        throw ConfigError("tiers", "expected a non-empty array");
    for (std::size_t i = 0; i < tiers.size(); ++i)
        sc.network.tiers.push_back(parse_tier(tiers[i], "tiers[" + std::to_string(i) + "]"));
    sc.network.user_density = positive(required(doc, "", "user_density"), "user_density");
    sc.network.bandwidth = positive(required(doc, "", "bandwidth"), "bandwidth");
    sc.network.path_loss_exponent =
        number(required(doc, "", "path_loss_exponent"), "path_loss_exponent");
    if (!(sc.network.path_loss_exponent > 2.0))
        throw ConfigError("path_loss_exponent", "must be > 2");
    try {
        sc.network.validate();
    } catch (const std::invalid_argument& e) {
        throw from_validation(e);
    }

    if (doc.contains("solver"))
        sc.solver = parse_solver(doc.at("solver"));
    if (doc.contains("sweep"))
        sc.sweep = parse_sweep(doc.at("sweep"), sc.network.num_tiers());
    if (doc.contains("simulation"))
        sc.simulation = parse_simulation(doc.at("simulation"), sc.network);
    return sc;
}

Scenario load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("", "cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("parse error: ") + e.what());
    }
    return parse_scenario(doc);
}

json to_json(const NetworkConfig& config)
{
    json tiers = json::array();
    for (const auto& t : config.tiers)
        tiers.push_back({{"power_dbm", t.power_dbm},
                         {"density", t.density},
                         {"bias", t.bias},
                         {"rate_threshold", t.rate_threshold}});
    return {{"tiers", tiers},
            {"user_density", config.user_density},
            {"bandwidth", config.bandwidth},
            {"path_loss_exponent", config.path_loss_exponent}};
}

std::string config_hash(const NetworkConfig& config)
{
    const std::string canonical = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace hetnet
