#ifndef HETNET_SWEEP_HPP
#define HETNET_SWEEP_HPP

#include "hetnet/config_io.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/ppp_simulator.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hetnet {

struct SweepRow
{
    std::optional<double> threshold; // swept rate threshold; empty for a single solve
    SweepMode mode = SweepMode::Joint;
    double objective = 0.0;
    Eigen::VectorXd assoc;
    Eigen::VectorXd spectrum;
    Eigen::VectorXd biases; // implied biases, 0 for tiers with A_k = 0
    bool converged = false;
    std::optional<double> mc_estimate;
    std::optional<double> mc_stderr;
};

struct Provenance
{
    std::string config_hash;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
};

struct SweepTable
{
    std::size_t num_tiers = 0;
    Provenance provenance;
    std::vector<SweepRow> rows;
};

/// Network with the swept threshold applied.
NetworkConfig apply_threshold(NetworkConfig config, const SweepSpec& spec, double value);

/// Solves one mode on one network and packages it as a row. Monte Carlo
/// columns are filled when `sim` is given.
SweepRow solve_row(const NetworkConfig& config, SweepMode mode, const SolveOptions& opts,
                   const SimConfig* sim);

/// One row per (value, mode), ordered by value then by the order of
/// spec.modes. Points run on `threads` workers; row order does not depend on
/// completion order. Solver failures are recorded per row.
SweepTable run_sweep(const NetworkConfig& config, const SweepSpec& spec, const SolveOptions& opts,
                     const SimConfig* sim, int threads = 1);

/// CSV with header
///   threshold,mode,objective,A_1..A_K,w_1..w_K,B_1..B_K,converged,mc_estimate,mc_stderr,
///   config_hash,seed,tolerance
/// and floats printed with 10 significant digits.
std::string to_csv(const SweepTable& table);

nlohmann::json to_json(const SweepTable& table);

/// Re-parse emitted results; both validate simplex constraints on every row
/// (within 1e-8, the precision of the printed digits) and throw ConfigError
/// otherwise.
SweepTable parse_results_csv(const std::string& csv);
SweepTable parse_results_json(const nlohmann::json& doc);

} // namespace hetnet

#endif // HETNET_SWEEP_HPP
