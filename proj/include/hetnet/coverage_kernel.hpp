#ifndef HETNET_COVERAGE_KERNEL_HPP
#define HETNET_COVERAGE_KERNEL_HPP

#include "hetnet/network_model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hetnet {

/// Per-user spectral demand (bits/s/Hz) above which a tier is treated as out
/// of coverage instead of evaluating 2^demand.
inline constexpr double kExponentCap = 1000.0;

/// Interference penalty kernel
///   rho(tau, alpha) = tau^(2/alpha) * int_{tau^(-2/alpha)}^inf du / (1 + u^(alpha/2)).
///
/// The finite part is integrated adaptively in log(u); the tail beyond
/// u^(alpha/2) >= 1e4 is summed from its alternating power series. Results are
/// memoized per thread on the exact argument bits.
double rho(double tau, double alpha);

/// rho without the memo cache.
double rho_uncached(double tau, double alpha);

/// d rho / d tau = (2 / (alpha tau)) [rho + tau / (1 + tau)], tau > 0.
double rho_dtau(double tau, double alpha);

/// Drops every memoized rho value held by the calling thread.
void clear_rho_cache();

struct SirThreshold
{
    double exponent = 0.0; // R_k N_k / (W w_k), bits/s/Hz
    double tau = 0.0;      // 2^exponent - 1
    bool capped = false;   // exponent exceeded kExponentCap (tier has zero coverage)
};

/// SIR threshold tau_k = 2^(R_k N_k / (W w_k)) - 1 implied by the rate
/// threshold. A zero load gives tau = 0; a zero spectrum share with positive
/// load is reported as capped.
SirThreshold sir_threshold(const NetworkConfig& config, const AllocationPair& alloc,
                           std::size_t k, LoadModel model);

/// Everything known about one tier's coverage term f_k = A_k / (1 + A_k rho).
struct TierTerm
{
    SirThreshold threshold;
    double rho = 0.0;
    double value = 0.0;          // f_k
    double grad_spectrum = 0.0;  // d f_k / d w_k
    double grad_assoc = 0.0;     // d f_k / d A_k through the gradient relation
    double direct_grad_assoc = 0.0; // d f_k / d A_k evaluated term by term
};

/// Evaluates f_k and both partial derivatives at (assoc, spectrum).
TierTerm tier_term(const NetworkConfig& config, double assoc, double spectrum, std::size_t k,
                   LoadModel model);

struct CoverageReport
{
    double objective = 0.0;
    Eigen::VectorXd per_tier_terms;
    Eigen::VectorXd grad_assoc;
    Eigen::VectorXd grad_spectrum;
    Eigen::VectorXd sir_thresholds;
    std::vector<bool> capped;
};

/// Rate coverage R_c = sum_k A_k / (1 + A_k rho(tau_k, alpha)) together with
/// its gradients. grad_assoc is obtained from grad_spectrum through
/// d f/d A = 1/(1 + A rho)^2 - (w N'/N) d f/d w, so one rho evaluation serves
/// both.
CoverageReport rate_coverage(const NetworkConfig& config, const AllocationPair& alloc,
                             LoadModel model);

/// d f_k / d w_k for every tier.
Eigen::VectorXd grad_spectrum(const NetworkConfig& config, const AllocationPair& alloc,
                              LoadModel model);

/// d f_k / d A_k for every tier, expanded through d rho / d A_k directly
/// rather than through the gradient relation.
Eigen::VectorXd grad_assoc(const NetworkConfig& config, const AllocationPair& alloc,
                           LoadModel model);

struct KktResidual
{
    double value = 0.0;
    bool boundary = false;     // some tier has A_k = 0 or w_k = 0
    std::size_t active_tiers = 0;
};

/// max_k |dfk/dAk - eta| + |dfk/dwk - mu| over tiers with both A_k and w_k
/// positive, where eta and mu are the means of the respective gradients over
/// those tiers.
KktResidual kkt_residual(const NetworkConfig& config, const AllocationPair& alloc,
                         LoadModel model);

/// Numerically integrates the joint probability that the typical user picks
/// tier k and meets its rate:
///   int_0^inf 2 pi lambda_k r exp(-pi lambda_k r^2 [rho(tau_k) + sum_j ...]) dr,
/// with the association sum taken from the configured biases and tau_k from
/// `alloc`.
double per_tier_coverage_integral(const NetworkConfig& config, const AllocationPair& alloc,
                                  LoadModel model, std::size_t k);

} // namespace hetnet

#endif // HETNET_COVERAGE_KERNEL_HPP
