#include "hetnet/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hetnet {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

// log of lambda_k (P_k B_k)^(2/alpha): the unnormalized association weight.
double log_assoc_weight(const TierParams& t, double alpha)
{
    return std::log(t.density) + (2.0 / alpha) * (std::log(t.linear_power()) + std::log(t.bias));
}

} // namespace

double TierParams::linear_power() const
{
    return std::pow(10.0, (power_dbm - 30.0) / 10.0);
}

void NetworkConfig::validate() const
{
    require(!tiers.empty(), "tiers: at least one tier is required");
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const auto& t = tiers[i];
        const std::string path = "tiers[" + std::to_string(i) + "].";
        require(std::isfinite(t.power_dbm), path + "power_dbm: must be finite");
        require(std::isfinite(t.density) && t.density > 0.0, path + "density: must be > 0");
        require(std::isfinite(t.bias) && t.bias > 0.0, path + "bias: must be > 0");
        require(std::isfinite(t.rate_threshold) && t.rate_threshold > 0.0,
                path + "rate_threshold: must be > 0");
        require(t.linear_power() > 0.0 && std::isfinite(t.linear_power()),
                path + "power_dbm: linear power out of range");
    }
    require(std::isfinite(user_density) && user_density > 0.0, "user_density: must be > 0");
    require(std::isfinite(bandwidth) && bandwidth > 0.0, "bandwidth: must be > 0");
    require(std::isfinite(path_loss_exponent) && path_loss_exponent > 2.0,
            "path_loss_exponent: must be > 2");
}

Eigen::VectorXd DensityOrder::to_input_order(const Eigen::VectorXd& sorted) const
{
    Eigen::VectorXd out(sorted.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        out[static_cast<Eigen::Index>(order[i])] = sorted[static_cast<Eigen::Index>(i)];
    return out;
}

Eigen::VectorXd DensityOrder::to_sorted_order(const Eigen::VectorXd& input) const
{
    Eigen::VectorXd out(input.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = input[static_cast<Eigen::Index>(order[i])];
    return out;
}

NetworkConfig sorted_by_density(const NetworkConfig& config, DensityOrder* order)
{
    std::vector<std::size_t> idx(config.tiers.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return config.tiers[a].density < config.tiers[b].density;
    });
    NetworkConfig out = config;
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.tiers[i] = config.tiers[idx[i]];
    if (order)
        order->order = std::move(idx);
    return out;
}

void AllocationPair::validate(std::size_t k, double tol) const
{
    auto check = [&](const Eigen::VectorXd& v, const char* name) {
        require(static_cast<std::size_t>(v.size()) == k,
                std::string(name) + ": expected " + std::to_string(k) + " entries");
        for (Eigen::Index i = 0; i < v.size(); ++i)
            require(std::isfinite(v[i]) && v[i] >= 0.0 && v[i] <= 1.0,
                    std::string(name) + "[" + std::to_string(i) + "]: must lie in [0,1]");
        require(std::abs(v.sum() - 1.0) <= tol, std::string(name) + ": must sum to 1");
    };
    check(assoc, "assoc");
    check(spectrum, "spectrum");
}

Eigen::VectorXd association_probabilities(const NetworkConfig& config)
{
    config.validate();
    const double alpha = config.path_loss_exponent;
    const auto k = static_cast<Eigen::Index>(config.num_tiers());

    Eigen::VectorXd logw(k);
    for (Eigen::Index i = 0; i < k; ++i)
        logw[i] = log_assoc_weight(config.tiers[static_cast<std::size_t>(i)], alpha);

    const Eigen::VectorXd w = (logw.array() - logw.maxCoeff()).exp().matrix();
    return w / w.sum();
}

Eigen::VectorXd biases_for_association(const NetworkConfig& config,
                                       const Eigen::VectorXd& target_assoc)
{
    config.validate();
    const auto k = static_cast<Eigen::Index>(config.num_tiers());
    require(target_assoc.size() == k, "target_assoc: size must equal the number of tiers");
    for (Eigen::Index i = 0; i < k; ++i)
        require(std::isfinite(target_assoc[i]) && target_assoc[i] > 0.0,
                "target_assoc[" + std::to_string(i) + "]: must be > 0 (a zero target needs B = 0)");
    require(std::abs(target_assoc.sum() - 1.0) <= 1e-9, "target_assoc: must sum to 1");

    const double half_alpha = 0.5 * config.path_loss_exponent;
    Eigen::VectorXd logb(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& t = config.tiers[static_cast<std::size_t>(i)];
        logb[i] = half_alpha * (std::log(target_assoc[i]) - std::log(t.density))
                - std::log(t.linear_power());
    }
    return (logb.array() - logb.minCoeff()).exp().matrix();
}

Eigen::VectorXd implied_biases(const NetworkConfig& config, const Eigen::VectorXd& assoc)
{
    const auto k = static_cast<Eigen::Index>(config.num_tiers());
    require(assoc.size() == k, "assoc: size must equal the number of tiers");

    std::vector<std::size_t> active;
    for (Eigen::Index i = 0; i < k; ++i)
        if (assoc[i] > 0.0)
            active.push_back(static_cast<std::size_t>(i));
    require(!active.empty(), "assoc: no tier has positive probability");

    NetworkConfig sub = config;
    sub.tiers.clear();
    Eigen::VectorXd target(static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) {
        sub.tiers.push_back(config.tiers[active[j]]);
        target[static_cast<Eigen::Index>(j)] = assoc[static_cast<Eigen::Index>(active[j])];
    }
    target /= target.sum();
    const Eigen::VectorXd b = biases_for_association(sub, target);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < active.size(); ++j)
        out[static_cast<Eigen::Index>(active[j])] = b[static_cast<Eigen::Index>(j)];
    return out;
}

NetworkConfig with_biases(NetworkConfig config, const Eigen::VectorXd& biases)
{
    require(static_cast<std::size_t>(biases.size()) == config.num_tiers(),
            "biases: size must equal the number of tiers");
    for (std::size_t i = 0; i < config.tiers.size(); ++i)
        config.tiers[i].bias = biases[static_cast<Eigen::Index>(i)];
    return config;
}

double tier_load(const NetworkConfig& config, double assoc, std::size_t k, LoadModel model)
{
    const double base = assoc * config.user_density / config.tiers[k].density;
    return model == LoadModel::MeanLoad ? base : 1.0 + kHigherLoadFactor * base;
}

double tier_load_slope(const NetworkConfig& config, std::size_t k, LoadModel model)
{
    const double slope = config.user_density / config.tiers[k].density;
    return model == LoadModel::MeanLoad ? slope : kHigherLoadFactor * slope;
}

Eigen::VectorXd mean_load(const NetworkConfig& config, const Eigen::VectorXd& assoc,
                          LoadModel model)
{
    config.validate();
    require(static_cast<std::size_t>(assoc.size()) == config.num_tiers(),
            "assoc: size must equal the number of tiers");
    Eigen::VectorXd n(assoc.size());
    for (Eigen::Index i = 0; i < assoc.size(); ++i)
        n[i] = tier_load(config, assoc[i], static_cast<std::size_t>(i), model);
    return n;
}

} // namespace hetnet
