#include "hetnet/ppp_simulator.hpp"

#include "hetnet/coverage_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace hetnet {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream for one drop; identical for any thread assignment.
std::mt19937_64 drop_stream(std::uint64_t seed, std::int64_t drop)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(drop)));
}

struct Ap
{
    double x;
    double y;
    double dist; // from the origin
};

// Drops one tier's PPP in a disk of radius `radius` centred on the user.
void drop_tier(std::mt19937_64& rng, double density, double radius, bool with_angles,
               std::vector<Ap>& out)
{
    std::poisson_distribution<std::int64_t> count(density * kPi * radius * radius);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::int64_t n = count(rng);
    out.clear();
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = radius * std::sqrt(unit(rng));
        if (with_angles) {
            const double theta = 2.0 * kPi * unit(rng);
            out.push_back({d * std::cos(theta), d * std::sin(theta), d});
        } else {
            out.push_back({0.0, 0.0, d});
        }
    }
}

struct Serving
{
    int tier = -1;
    std::size_t ap = 0;
};

// Tier and AP maximizing log(P B) - alpha log d; tiers with zero bias are skipped.
Serving associate(const std::vector<std::vector<Ap>>& aps, const std::vector<double>& log_pb,
                  double alpha)
{
    Serving s;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < aps.size(); ++t) {
        if (!std::isfinite(log_pb[t]) || aps[t].empty())
            continue;
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < aps[t].size(); ++i)
            if (aps[t][i].dist < aps[t][nearest].dist)
                nearest = i;
        const double metric = log_pb[t] - alpha * std::log(aps[t][nearest].dist);
        if (metric > best) {
            best = metric;
            s.tier = static_cast<int>(t);
            s.ap = nearest;
        }
    }
    return s;
}

// Uniform bucket grid over the square [-radius, radius]^2 for one tier.
class ApGrid
{
public:
    ApGrid(const std::vector<Ap>& aps, double radius, double density) : aps_(aps), radius_(radius)
    {
        cell_ = std::max(1.0 / std::sqrt(density), 2.0 * radius / 512.0);
        side_ = std::max(1, static_cast<int>(std::ceil(2.0 * radius / cell_)));
        buckets_.assign(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), {});
        for (std::size_t i = 0; i < aps.size(); ++i)
            buckets_[index(cell_of(aps[i].x), cell_of(aps[i].y))].push_back(i);
    }

    // True if some AP other than `skip` lies strictly within `r0` of (x, y).
    bool any_within(double x, double y, double r0, std::size_t skip) const
    {
        const int cx = cell_of(x);
        const int cy = cell_of(y);
        const int rings = static_cast<int>(std::ceil(r0 / cell_)) + 1;
        const double r2 = r0 * r0;
        for (int ring = 0; ring <= rings && ring <= side_; ++ring) {
            for (int gx = cx - ring; gx <= cx + ring; ++gx) {
                if (gx < 0 || gx >= side_)
                    continue;
                const bool edge_col = (gx == cx - ring || gx == cx + ring);
                for (int gy = cy - ring; gy <= cy + ring; ++gy) {
                    if (gy < 0 || gy >= side_)
                        continue;
                    if (!edge_col && gy != cy - ring && gy != cy + ring)
                        continue;
                    for (std::size_t i : buckets_[index(gx, gy)]) {
                        if (i == skip)
                            continue;
                        const double dx = aps_[i].x - x;
                        const double dy = aps_[i].y - y;
                        if (dx * dx + dy * dy < r2)
                            return true;
                    }
                }
            }
        }
        return false;
    }

private:
    int cell_of(double v) const
    {
        return std::clamp(static_cast<int>((v + radius_) / cell_), 0, side_ - 1);
    }
    std::size_t index(int gx, int gy) const
    {
        return static_cast<std::size_t>(gx) * static_cast<std::size_t>(side_)
             + static_cast<std::size_t>(gy);
    }

    const std::vector<Ap>& aps_;
    double radius_;
    double cell_ = 1.0;
    int side_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

// Users of a user PPP in the window that associate with the given serving AP.
std::int64_t users_in_cell(std::mt19937_64& rng, const NetworkConfig& config,
                           const std::vector<std::vector<Ap>>& aps,
                           const std::vector<double>& log_pb, const Serving& serving,
                           double radius)
{
    const double alpha = config.path_loss_exponent;
    std::vector<Ap> users;
    drop_tier(rng, config.user_density, radius, true, users);

    std::vector<std::optional<ApGrid>> grids(aps.size());
    for (std::size_t t = 0; t < aps.size(); ++t)
        if (std::isfinite(log_pb[t]))
            grids[t].emplace(aps[t], radius, config.tiers[t].density);

    const auto st = static_cast<std::size_t>(serving.tier);
    const Ap& s = aps[st][serving.ap];
    std::int64_t count = 0;
    for (const Ap& u : users) {
        const double ds = std::hypot(u.x - s.x, u.y - s.y);
        bool own = true;
        for (std::size_t t = 0; t < aps.size() && own; ++t) {
            if (!grids[t])
                continue;
            // An AP of tier t beats s iff it is closer than ds * (P_t B_t / P_s B_s)^(1/alpha).
            const double r0 = ds * std::exp((log_pb[t] - log_pb[st]) / alpha);
            const std::size_t skip = (t == st) ? serving.ap : std::numeric_limits<std::size_t>::max();
            if (grids[t]->any_within(u.x, u.y, r0, skip))
                own = false;
        }
        if (own)
            ++count;
    }
    return count;
}

struct Tally
{
    std::int64_t covered = 0;
    std::int64_t empty = 0;
    std::vector<std::int64_t> assoc;
    std::vector<std::int64_t> tier_covered;

    explicit Tally(std::size_t k) : assoc(k, 0), tier_covered(k, 0) {}

    void merge(const Tally& o)
    {
        covered += o.covered;
        empty += o.empty;
        for (std::size_t t = 0; t < assoc.size(); ++t) {
            assoc[t] += o.assoc[t];
            tier_covered[t] += o.tier_covered[t];
        }
    }
};

template <typename Body>
void for_each_drop_chunk(std::int64_t drops, int threads, Body body)
{
    const auto n = static_cast<std::int64_t>(std::max(1, threads));
    if (n == 1) {
        body(std::size_t{0}, std::int64_t{0}, drops);
        return;
    }
    std::vector<std::future<void>> pending;
    for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t begin = drops * c / n;
        const std::int64_t end = drops * (c + 1) / n;
        pending.push_back(
            std::async(std::launch::async, body, static_cast<std::size_t>(c), begin, end));
    }
    for (auto& f : pending)
        f.get();
}

std::vector<double> log_metrics(const NetworkConfig& config, const Eigen::VectorXd& biases)
{
    std::vector<double> out(config.num_tiers());
    for (std::size_t t = 0; t < out.size(); ++t) {
        const double b = biases[static_cast<Eigen::Index>(t)];
        out[t] = b > 0.0 ? std::log(config.tiers[t].linear_power() * b)
                         : -std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace

double default_window_radius(const NetworkConfig& config)
{
    double lambda_min = std::numeric_limits<double>::infinity();
    for (const auto& t : config.tiers)
        lambda_min = std::min(lambda_min, t.density);
    return 10.0 / std::sqrt(kPi * lambda_min);
}

double SimConfig::radius_for(const NetworkConfig& config) const
{
    return window_radius ? *window_radius : default_window_radius(config);
}

void SimConfig::validate(const NetworkConfig& config) const
{
    config.validate();
    const double radius = radius_for(config);
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("simulation.window_radius: must be > 0");
    double lambda_min = std::numeric_limits<double>::infinity();
    for (const auto& t : config.tiers)
        lambda_min = std::min(lambda_min, t.density);
    const double mean_nearest = 0.5 / std::sqrt(lambda_min);
    if (!(mean_nearest < radius / 5.0))
        throw std::invalid_argument("simulation.window_radius: too small, mean nearest-AP distance "
                                    + std::to_string(mean_nearest) + " must be below radius/5");
    if (num_drops <= 0)
        throw std::invalid_argument("simulation.num_drops: must be > 0");
    if (threads <= 0)
        throw std::invalid_argument("threads: must be > 0");
}

SimOutcome simulate_coverage(const NetworkConfig& config, const AllocationPair& alloc,
                             const SimConfig& sim)
{
    sim.validate(config);
    const std::size_t k = config.num_tiers();
    alloc.validate(k, 1e-9);

    const double radius = sim.radius_for(config);
    const double alpha = config.path_loss_exponent;
    const auto log_pb = log_metrics(config, implied_biases(config, alloc.assoc));
    const bool actual = sim.load_mode == SimLoadMode::ActualCount;

    // Analytic thresholds do not depend on the drop.
    std::vector<SirThreshold> analytic(k);
    for (std::size_t t = 0; t < k; ++t)
        analytic[t] = sir_threshold(config, alloc, t, sim.load_model);

    std::vector<Tally> tallies;
    const int chunks = std::max(1, sim.threads);
    tallies.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c)
        tallies.emplace_back(k);

    for_each_drop_chunk(sim.num_drops, chunks, [&](std::size_t chunk, std::int64_t begin, std::int64_t end) {
        Tally local(k);
        std::vector<std::vector<Ap>> aps(k);
        std::exponential_distribution<double> fading(1.0);
        for (std::int64_t d = begin; d < end; ++d) {
            auto rng = drop_stream(sim.seed, d);
            for (std::size_t t = 0; t < k; ++t) {
                if (std::isfinite(log_pb[t]))
                    drop_tier(rng, config.tiers[t].density, radius, actual, aps[t]);
                else
                    aps[t].clear();
            }
            const Serving s = associate(aps, log_pb, alpha);
            if (s.tier < 0) {
                ++local.empty;
                continue;
            }
            const auto st = static_cast<std::size_t>(s.tier);
            ++local.assoc[st];

            double signal = 0.0;
            double interference = 0.0;
            for (std::size_t i = 0; i < aps[st].size(); ++i) {
                const double p = fading(rng) * std::pow(aps[st][i].dist, -alpha);
                (i == s.ap ? signal : interference) += p;
            }

            SirThreshold th = analytic[st];
            if (actual) {
                const double load =
                    static_cast<double>(users_in_cell(rng, config, aps, log_pb, s, radius)) + 1.0;
                const double w = alloc.spectrum[static_cast<Eigen::Index>(st)];
                const double e = w > 0.0 ? config.tiers[st].rate_threshold * load / (config.bandwidth * w)
                                         : std::numeric_limits<double>::infinity();
                th.capped = e > kExponentCap;
                th.exponent = std::min(e, kExponentCap);
                th.tau = std::expm1(th.exponent * std::numbers::ln2);
            }
            if (th.capped)
                continue;
            // SIR >= tau, written without dividing by a possibly zero interference.
            if (signal >= th.tau * interference) {
                ++local.covered;
                ++local.tier_covered[st];
            }
        }
        tallies[chunk].merge(local);
    });

    Tally total(k);
    for (const auto& t : tallies)
        total.merge(t);

    SimOutcome out;
    out.drops = sim.num_drops;
    out.seed = sim.seed;
    out.empty_drops = total.empty;
    const auto n = static_cast<double>(sim.num_drops);
    out.per_tier_assoc_empirical.resize(static_cast<Eigen::Index>(k));
    out.per_tier_coverage.resize(static_cast<Eigen::Index>(k));
    for (std::size_t t = 0; t < k; ++t) {
        out.per_tier_assoc_empirical[static_cast<Eigen::Index>(t)] = static_cast<double>(total.assoc[t]) / n;
        out.per_tier_coverage[static_cast<Eigen::Index>(t)] = static_cast<double>(total.tier_covered[t]) / n;
    }
    out.coverage_estimate = static_cast<double>(total.covered) / n;
    out.std_error = std::sqrt(out.coverage_estimate * (1.0 - out.coverage_estimate) / n);
    return out;
}

std::vector<double> simulate_assoc_distance(const NetworkConfig& config, const SimConfig& sim,
                                            std::size_t k)
{
    sim.validate(config);
    if (k >= config.num_tiers())
        throw std::out_of_range("tier index out of range");

    const double radius = sim.radius_for(config);
    const double alpha = config.path_loss_exponent;
    Eigen::VectorXd biases(static_cast<Eigen::Index>(config.num_tiers()));
    for (std::size_t t = 0; t < config.num_tiers(); ++t)
        biases[static_cast<Eigen::Index>(t)] = config.tiers[t].bias;
    const auto log_pb = log_metrics(config, biases);

    const int chunks = std::max(1, sim.threads);
    std::vector<std::vector<double>> parts(static_cast<std::size_t>(chunks));
    for_each_drop_chunk(sim.num_drops, chunks, [&](std::size_t chunk, std::int64_t begin, std::int64_t end) {
        std::vector<std::vector<Ap>> aps(config.num_tiers());
        auto& out = parts[chunk];
        for (std::int64_t d = begin; d < end; ++d) {
            auto rng = drop_stream(sim.seed, d);
            for (std::size_t t = 0; t < config.num_tiers(); ++t)
                drop_tier(rng, config.tiers[t].density, radius, false, aps[t]);
            const Serving s = associate(aps, log_pb, alpha);
            if (s.tier == static_cast<int>(k))
                out.push_back(aps[k][s.ap].dist);
        }
    });

    std::vector<double> all;
    for (const auto& p : parts)
        all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end());
    return all;
}

double conditional_distance_cdf(const NetworkConfig& config, std::size_t k, double r)
{
    const Eigen::VectorXd a = association_probabilities(config);
    const double lambda = config.tiers[k].density;
    return -std::expm1(-kPi * lambda * r * r / a[static_cast<Eigen::Index>(k)]);
}

double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf)
{
    const auto n = static_cast<double>(sorted_sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
        const double f = cdf(sorted_sample[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double ks_critical_value(std::size_t n, double significance)
{
    return std::sqrt(-std::log(significance / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

} // namespace hetnet
