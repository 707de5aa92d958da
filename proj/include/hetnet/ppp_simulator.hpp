#ifndef HETNET_PPP_SIMULATOR_HPP
#define HETNET_PPP_SIMULATOR_HPP

#include "hetnet/network_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace hetnet {

enum class SimLoadMode
{
    AnalyticAverage, // N_k from the load model
    ActualCount      // users realized in the serving cell, plus the reference user
};

struct SimConfig
{
    std::optional<double> window_radius; // disk radius; default 10 / sqrt(pi lambda_min)
    std::int64_t num_drops = 20000;
    std::uint64_t seed = 1;
    SimLoadMode load_mode = SimLoadMode::AnalyticAverage;
    LoadModel load_model = LoadModel::MeanLoad; // used by AnalyticAverage
    int threads = 1;

    /// Window radius actually used for `config`.
    double radius_for(const NetworkConfig& config) const;

    /// Rejects windows in which the sparsest tier's mean nearest-AP distance,
    /// 1 / (2 sqrt(lambda_min)), is not below a fifth of the radius.
    void validate(const NetworkConfig& config) const;
};

double default_window_radius(const NetworkConfig& config);

struct SimOutcome
{
    double coverage_estimate = 0.0;
    double std_error = 0.0;
    Eigen::VectorXd per_tier_assoc_empirical;
    Eigen::VectorXd per_tier_coverage;
    std::int64_t drops = 0;
    std::int64_t empty_drops = 0; // drops with no AP in any eligible tier
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of rate coverage at a given allocation. The typical
/// user sits at the origin of a disk; each drop places independent PPPs for
/// every tier, associates the user to the largest biased average power using
/// the biases that realize alloc.assoc, draws Rayleigh fading, and tests
/// W (w_k / N_k) log2(1 + SIR) >= R_k with only same-tier interference.
SimOutcome simulate_coverage(const NetworkConfig& config, const AllocationPair& alloc,
                             const SimConfig& sim);

/// Serving distances of drops in which the user associates with tier k,
/// using the configured biases. Sorted ascending.
std::vector<double> simulate_assoc_distance(const NetworkConfig& config, const SimConfig& sim,
                                            std::size_t k);

/// Analytic CDF of the serving distance conditioned on associating with tier k:
/// 1 - exp(-pi lambda_k r^2 / A_k).
double conditional_distance_cdf(const NetworkConfig& config, std::size_t k, double r);

/// One-sample Kolmogorov-Smirnov statistic of a sorted sample against `cdf`.
double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf);

/// Asymptotic KS critical value sqrt(-ln(significance / 2) / 2) / sqrt(n).
double ks_critical_value(std::size_t n, double significance);

} // namespace hetnet

#endif // HETNET_PPP_SIMULATOR_HPP
