#ifndef HETNET_OPTIMIZERS_HPP
#define HETNET_OPTIMIZERS_HPP

#include "hetnet/coverage_kernel.hpp"
#include "hetnet/network_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hetnet {

struct SolveOptions
{
    double tolerance = 1e-8;     // KKT residual that counts as stationary
    int max_iterations = 10000;  // per start
    int restarts = 8;            // random starts on top of the closed-form warm start
    double grid_step = 0.01;     // brute-force lattice spacing
    std::uint64_t seed = 0x5eedULL;
    int threads = 1;             // starts solved concurrently

    void validate() const;
};

enum class SolveMode
{
    Joint,
    EqualFractions,
    MaxSirSpectrumOnly,
    BruteForce
};

std::string to_string(SolveMode mode);

struct SolveResult
{
    AllocationPair alloc;
    CoverageReport report; // rate_coverage recomputed at alloc
    bool converged = false;
    int iterations = 0;
    SolveMode mode = SolveMode::Joint;
    LoadModel load = LoadModel::MeanLoad;
    double kkt = 0.0;          // stationarity residual at alloc
    bool degenerate = false;   // closed form hit a zero-threshold tier
    std::vector<double> start_objectives; // local optimum per start, warm start first
};

/// Maximizes rate coverage jointly over association and spectrum shares.
/// Projected gradient ascent with Armijo backtracking on the product of two
/// simplices, polished by Newton steps on the KKT system, started from the
/// equal-fractions closed form and `opts.restarts` uniform random points.
/// The best local optimum is returned; converged=false if its KKT residual
/// did not fall below opts.tolerance.
SolveResult optimize_joint(const NetworkConfig& config, LoadModel model,
                           const SolveOptions& opts = {});

/// Closed-form optimum of the restricted problem A = w:
///   A_k = w_k = (1 / rho(tau_bar_k)) / sum_j (1 / rho(tau_bar_j)),
///   tau_bar_k = 2^(R_k lambda_u / (W lambda_k)) - 1.
/// Only defined for the mean-load model.
SolveResult optimize_equal_fractions(const NetworkConfig& config,
                                     LoadModel model = LoadModel::MeanLoad);

/// Spectrum-only optimization under unbiased association. All biases in
/// `config` must be equal.
SolveResult optimize_spectrum_maxsir(const NetworkConfig& config, LoadModel model,
                                     const SolveOptions& opts = {});

/// Exhaustive search over the product of the two simplex lattices with
/// spacing grid_step. Exact over the lattice: the objective is a sum of
/// per-tier terms, so the search runs as a dynamic program over a table of
/// f_k(a, w). Limited to K <= 4 and 10^7 lattice points per simplex.
SolveResult brute_force(const NetworkConfig& config, LoadModel model, double grid_step);

} // namespace hetnet

#endif // HETNET_OPTIMIZERS_HPP
