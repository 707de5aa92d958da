#include "hetnet/coverage_kernel.hpp"

#include "hetnet/quadrature.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace hetnet {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// u^beta at the switch point from quadrature to the tail series.
constexpr double kTailStart = 1e4;
constexpr std::size_t kCacheLimit = std::size_t{1} << 18;

void require_alpha(double alpha)
{
    if (!(alpha > 2.0) || !std::isfinite(alpha))
        throw std::invalid_argument("path_loss_exponent: must be > 2, got " + std::to_string(alpha));
}

// int_U^inf du / (1 + u^beta) = sum_n (-1)^n U^(1 - (n+1) beta) / ((n+1) beta - 1),
// valid for U^beta > 1.
double tail_series(double upper, double beta)
{
    const double x = std::pow(upper, -beta);
    double power = upper * x; // U^(1 - beta)
    double sum = 0.0;
    for (int n = 0; n < 200; ++n) {
        const double term = power / ((n + 1) * beta - 1.0);
        sum += (n % 2 == 0) ? term : -term;
        if (term <= 1e-18 * std::abs(sum))
            break;
        power *= x;
    }
    return sum;
}

// int_a^inf du / (1 + u^beta), a >= 0.
double penalty_integral(double lower, double beta)
{
    const double switch_point = std::pow(kTailStart, 1.0 / beta);
    if (lower >= switch_point)
        return tail_series(lower, beta);

    // Substitute u = e^s so panels spread evenly across decades of u.
    auto integrand = [beta](double s) {
        const double u = std::exp(s);
        return u / (1.0 + std::pow(u, beta));
    };
    const double log_lower = std::log(std::max(lower, 1e-300));
    const auto finite = integrate_adaptive(integrand, log_lower, std::log(switch_point), 1e-14);
    return finite.value + tail_series(switch_point, beta);
}

struct CacheKey
{
    std::uint64_t tau;
    std::uint64_t alpha;
    bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash
{
    std::size_t operator()(const CacheKey& k) const noexcept
    {
        return std::hash<std::uint64_t>{}(k.tau * 0x9E3779B97F4A7C15ULL ^ k.alpha);
    }
};

std::unordered_map<CacheKey, double, CacheKeyHash>& rho_cache()
{
    thread_local std::unordered_map<CacheKey, double, CacheKeyHash> cache;
    return cache;
}

} // namespace

double rho_uncached(double tau, double alpha)
{
    require_alpha(alpha);
    if (!(tau >= 0.0))
        throw std::invalid_argument("tau: must be >= 0");
    if (tau == 0.0)
        return 0.0;
    if (std::isinf(tau))
        return tau;
    const double beta = 0.5 * alpha;
    const double lower = std::pow(tau, -1.0 / beta);
    return std::pow(tau, 1.0 / beta) * penalty_integral(lower, beta);
}

double rho(double tau, double alpha)
{
    auto& cache = rho_cache();
    const CacheKey key{std::bit_cast<std::uint64_t>(tau), std::bit_cast<std::uint64_t>(alpha)};
    if (auto it = cache.find(key); it != cache.end())
        return it->second;
    const double value = rho_uncached(tau, alpha);
    if (cache.size() >= kCacheLimit)
        cache.clear();
    cache.emplace(key, value);
    return value;
}

void clear_rho_cache()
{
    rho_cache().clear();
}

double rho_dtau(double tau, double alpha)
{
    require_alpha(alpha);
    if (!(tau > 0.0))
        throw std::invalid_argument("tau: derivative requires tau > 0");
    return 2.0 / (alpha * tau) * (rho(tau, alpha) + tau / (1.0 + tau));
}

namespace {

SirThreshold threshold_for(const NetworkConfig& config, double assoc, double spectrum,
                           std::size_t k, LoadModel model)
{
    const double load = tier_load(config, assoc, k, model);
    SirThreshold out;
    if (load == 0.0)
        return out;
    if (spectrum <= 0.0) {
        out.exponent = kExponentCap;
        out.capped = true;
    } else {
        out.exponent = config.tiers[k].rate_threshold * load / (config.bandwidth * spectrum);
        out.capped = out.exponent > kExponentCap;
        if (out.capped)
            out.exponent = kExponentCap;
    }
    out.tau = std::expm1(out.exponent * kLn2);
    return out;
}

} // namespace

SirThreshold sir_threshold(const NetworkConfig& config, const AllocationPair& alloc,
                           std::size_t k, LoadModel model)
{
    if (k >= config.num_tiers())
        throw std::out_of_range("tier index out of range");
    const auto i = static_cast<Eigen::Index>(k);
    return threshold_for(config, alloc.assoc[i], alloc.spectrum[i], k, model);
}

TierTerm tier_term(const NetworkConfig& config, double assoc, double spectrum, std::size_t k,
                   LoadModel model)
{
    const double alpha = config.path_loss_exponent;
    require_alpha(alpha);

    TierTerm out;
    out.threshold = threshold_for(config, assoc, spectrum, k, model);
    const double tau = out.threshold.tau;

    if (tau == 0.0) {
        // Limits of the gradient expressions as tau -> 0.
        out.value = assoc;
        out.grad_assoc = 1.0;
        out.direct_grad_assoc = 1.0;
        return out;
    }

    const double r = config.tiers[k].rate_threshold;
    const double load = tier_load(config, assoc, k, model);
    const double load_slope = tier_load_slope(config, k, model);
    // A capped tier is evaluated at the spectrum share that puts its demand
    // exactly at the cap.
    const double w_eff =
        out.threshold.capped ? r * load / (config.bandwidth * kExponentCap) : spectrum;

    out.rho = rho(tau, alpha);
    const double s = 1.0 + assoc * out.rho;
    const double bracket = (1.0 + tau) * (out.rho / tau) + 1.0; // ((1+tau) rho + tau) / tau
    const double d = 2.0 * kLn2 / alpha * bracket;

    out.value = out.threshold.capped ? 0.0 : assoc / s;
    out.grad_spectrum = d * (out.threshold.exponent / w_eff) * assoc * assoc / (s * s);
    out.grad_assoc = 1.0 / (s * s) - (w_eff * load_slope / load) * out.grad_spectrum;
    out.direct_grad_assoc =
        (1.0 - assoc * assoc * d * (r * load_slope / (config.bandwidth * w_eff))) / (s * s);
    return out;
}

CoverageReport rate_coverage(const NetworkConfig& config, const AllocationPair& alloc,
                             LoadModel model)
{
    config.validate();
    const std::size_t k = config.num_tiers();
    alloc.validate(k, 1e-9);

    const auto n = static_cast<Eigen::Index>(k);
    CoverageReport rep;
    rep.per_tier_terms.resize(n);
    rep.grad_assoc.resize(n);
    rep.grad_spectrum.resize(n);
    rep.sir_thresholds.resize(n);
    rep.capped.assign(k, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto t = tier_term(config, alloc.assoc[i], alloc.spectrum[i],
                                 static_cast<std::size_t>(i), model);
        rep.per_tier_terms[i] = t.value;
        rep.grad_assoc[i] = t.grad_assoc;
        rep.grad_spectrum[i] = t.grad_spectrum;
        rep.sir_thresholds[i] = t.threshold.tau;
        rep.capped[static_cast<std::size_t>(i)] = t.threshold.capped;
    }
    rep.objective = rep.per_tier_terms.sum();
    return rep;
}

Eigen::VectorXd grad_spectrum(const NetworkConfig& config, const AllocationPair& alloc,
                              LoadModel model)
{
    return rate_coverage(config, alloc, model).grad_spectrum;
}

Eigen::VectorXd grad_assoc(const NetworkConfig& config, const AllocationPair& alloc,
                           LoadModel model)
{
    config.validate();
    alloc.validate(config.num_tiers(), 1e-9);
    Eigen::VectorXd g(alloc.assoc.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        g[i] = tier_term(config, alloc.assoc[i], alloc.spectrum[i], static_cast<std::size_t>(i),
                         model)
                   .direct_grad_assoc;
    return g;
}

KktResidual kkt_residual(const NetworkConfig& config, const AllocationPair& alloc,
                         LoadModel model)
{
    const auto rep = rate_coverage(config, alloc, model);
    KktResidual out;
    double eta = 0.0;
    double mu = 0.0;
    for (Eigen::Index i = 0; i < alloc.assoc.size(); ++i) {
        if (alloc.assoc[i] > 0.0 && alloc.spectrum[i] > 0.0) {
            eta += rep.grad_assoc[i];
            mu += rep.grad_spectrum[i];
            ++out.active_tiers;
        } else {
            out.boundary = true;
        }
    }
    if (out.active_tiers == 0)
        return out;
    eta /= static_cast<double>(out.active_tiers);
    mu /= static_cast<double>(out.active_tiers);
    for (Eigen::Index i = 0; i < alloc.assoc.size(); ++i) {
        if (alloc.assoc[i] > 0.0 && alloc.spectrum[i] > 0.0)
            out.value = std::max(out.value, std::abs(rep.grad_assoc[i] - eta)
                                                + std::abs(rep.grad_spectrum[i] - mu));
    }
    return out;
}

double per_tier_coverage_integral(const NetworkConfig& config, const AllocationPair& alloc,
                                  LoadModel model, std::size_t k)
{
    config.validate();
    alloc.validate(config.num_tiers(), 1e-9);
    if (k >= config.num_tiers())
        throw std::out_of_range("tier index out of range");

    const auto th = sir_threshold(config, alloc, k, model);
    if (th.capped)
        return 0.0;

    const double alpha = config.path_loss_exponent;
    const auto& own = config.tiers[k];
    const double own_metric = own.linear_power() * own.bias;
    double assoc_sum = 0.0;
    for (const auto& t : config.tiers)
        assoc_sum += (t.density / own.density)
                   * std::pow(t.linear_power() * t.bias / own_metric, 2.0 / alpha);

    const double c = rho(th.tau, alpha) + assoc_sum;
    const double lambda = own.density;
    const double pi = std::numbers::pi;
    // r = scale * t / (1 - t) maps [0, 1) onto [0, inf).
    const double scale = 1.0 / std::sqrt(pi * lambda * c);
    auto integrand = [&](double t) {
        const double one_minus = 1.0 - t;
        const double r = scale * t / one_minus;
        const double jac = scale / (one_minus * one_minus);
        return 2.0 * pi * lambda * r * std::exp(-pi * lambda * r * r * c) * jac;
    };
    return integrate_adaptive(integrand, 0.0, 1.0, 1e-13).value;
}

} // namespace hetnet
