#ifndef HETNET_VALIDATION_HPP
#define HETNET_VALIDATION_HPP

#include "hetnet/network_model.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace hetnet {

/// Three-tier macro/pico/femto scenario: lambda_u = 0.05,
/// lambda = {0.01, 0.05, 0.2} lambda_u, P = {46, 30, 20} dBm, alpha = 3.5,
/// unit biases. The bandwidth is a free choice; 10 MHz by default.
NetworkConfig reference_three_tier(double r1, double r2, double r3, double bandwidth = 10e6);
NetworkConfig reference_three_tier(double rate_threshold, double bandwidth = 10e6);

/// Random K-tier network whose per-tier spectral demand R_k lambda_u / (W lambda_k)
/// lies in [0.05, 2] bits/s/Hz.
NetworkConfig random_network(std::size_t k, std::mt19937_64& rng);

/// Random allocation with every entry at least `min_share`.
AllocationPair random_interior_allocation(std::size_t k, std::mt19937_64& rng, double min_share = 0.02);

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationCheck
{
    std::string name;
    std::function<CheckResult()> run;
};

/// Numerical and statistical checks of the whole stack, one per acceptance
/// criterion, in criterion order.
std::vector<ValidationCheck> validation_checks(int threads = 1);

CheckResult check_rho_closed_form();
CheckResult check_gradients_finite_difference();
CheckResult check_gradient_relation();
CheckResult check_coverage_integral();
CheckResult check_closed_form_stationarity();
CheckResult check_oracle_equivalence();
CheckResult check_equal_fractions_gap();
CheckResult check_maxsir_inferiority();
CheckResult check_monte_carlo(int threads);
CheckResult check_offloading_direction();
CheckResult check_determinism(int threads);

} // namespace hetnet

#endif // HETNET_VALIDATION_HPP
