#ifndef HETNET_NETWORK_MODEL_HPP
#define HETNET_NETWORK_MODEL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hetnet {

/// Per-tier physical parameters of one class of access points.
struct TierParams
{
    double power_dbm = 0.0;      // transmit power, dBm
    double density = 0.0;       // APs per unit area
    double bias = 1.0;           // linear association bias, > 0
    double rate_threshold = 0.0; // bits/s

    /// Transmit power in watts, 10^((dBm - 30) / 10).
    double linear_power() const;
};

/// A K-tier downlink scenario.
struct NetworkConfig
{
    std::vector<TierParams> tiers;
    double user_density = 0.0;       // users per unit area
    double bandwidth = 0.0;          // Hz
    double path_loss_exponent = 0.0; // alpha, must exceed 2

    std::size_t num_tiers() const { return tiers.size(); }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Tier order sorted by increasing density. `order[i]` is the caller's index
/// of the i-th sparsest tier.
struct DensityOrder
{
    std::vector<std::size_t> order;

    /// Permutes a vector given in sorted order back to the caller's order.
    Eigen::VectorXd to_input_order(const Eigen::VectorXd& sorted) const;
    /// Permutes a vector given in the caller's order to sorted order.
    Eigen::VectorXd to_sorted_order(const Eigen::VectorXd& input) const;
};

/// Returns a copy of `config` with tiers sorted by increasing density
/// (stable, so equal densities keep their relative order).
NetworkConfig sorted_by_density(const NetworkConfig& config, DensityOrder* order = nullptr);

/// Association probabilities and spectrum fractions, each on the simplex.
struct AllocationPair
{
    Eigen::VectorXd assoc;
    Eigen::VectorXd spectrum;

    /// Throws std::invalid_argument if either vector leaves the simplex
    /// (entries in [0,1], sum within `tol` of 1) or sizes disagree with `k`.
    void validate(std::size_t k, double tol = 1e-12) const;
};

enum class LoadModel
{
    MeanLoad,   // A_k lambda_u / lambda_k
    HigherLoad  // 1 + 1.28 A_k lambda_u / lambda_k
};

inline constexpr double kHigherLoadFactor = 1.28;

/// Tier association probabilities under biased average-received-power
/// association:  A_k^-1 = sum_j (lambda_j / lambda_k) (P_j B_j / P_k B_k)^(2/alpha).
///
/// Evaluated as normalized weights lambda_k (P_k B_k)^(2/alpha) in the log
/// domain, so the result sums to one up to a single rounding.
Eigen::VectorXd association_probabilities(const NetworkConfig& config);

/// Inverts association_probabilities: biases B with
/// B_k proportional to (A_k / lambda_k)^(alpha/2) / P_k, scaled so min_k B_k = 1.
/// Every target entry must be strictly positive.
Eigen::VectorXd biases_for_association(const NetworkConfig& config,
                                       const Eigen::VectorXd& target_assoc);

/// Same as biases_for_association but tolerates zero targets, which map to a
/// zero bias (the tier is never selected). Used for reporting.
Eigen::VectorXd implied_biases(const NetworkConfig& config, const Eigen::VectorXd& assoc);

/// Copy of `config` with biases replaced.
NetworkConfig with_biases(NetworkConfig config, const Eigen::VectorXd& biases);

/// Average number of users per AP in each tier.
Eigen::VectorXd mean_load(const NetworkConfig& config, const Eigen::VectorXd& assoc,
                          LoadModel model);

/// Load of a single tier, and its derivative with respect to A_k.
double tier_load(const NetworkConfig& config, double assoc, std::size_t k, LoadModel model);
double tier_load_slope(const NetworkConfig& config, std::size_t k, LoadModel model);

} // namespace hetnet

#endif // HETNET_NETWORK_MODEL_HPP
