#include <doctest.h>

#include "hetnet/coverage_kernel.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/ppp_simulator.hpp"
#include "hetnet/validation.hpp"

#include <cmath>

using namespace hetnet;

namespace {

SimConfig drops(std::int64_t n, std::uint64_t seed = 17, int threads = 1)
{
    SimConfig s;
    s.num_drops = n;
    s.seed = seed;
    s.threads = threads;
    return s;
}

} // namespace

TEST_CASE("vanishing threshold, single tier: always covered")
{
    NetworkConfig c;
    c.user_density = 0.02;
    c.bandwidth = 1e7;
    c.path_loss_exponent = 4.0;
    c.tiers = {{43.0, 0.001, 1.0, 1e-9}};
    const auto out = simulate_coverage(c, {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)}, drops(2000));
    CHECK(out.coverage_estimate == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("outcome bookkeeping")
{
    const auto c = reference_three_tier(1e6);
    const auto ef = optimize_equal_fractions(c);
    for (auto mode : {SimLoadMode::AnalyticAverage, SimLoadMode::ActualCount}) {
        const std::int64_t n = mode == SimLoadMode::ActualCount ? 400 : 3000;
        auto s = drops(n);
        s.load_mode = mode;
        const auto out = simulate_coverage(c, ef.alloc, s);
        CHECK(out.drops == n);
        CHECK(out.seed == 17);
        CHECK(out.coverage_estimate >= 0.0);
        CHECK(out.coverage_estimate <= 1.0);
        CHECK(out.per_tier_coverage.sum() == doctest::Approx(out.coverage_estimate).epsilon(1e-12));
        CHECK(out.per_tier_assoc_empirical.sum() == doctest::Approx(1.0).epsilon(1e-12));
        const double p = out.coverage_estimate;
        CHECK(out.std_error == doctest::Approx(std::sqrt(p * (1 - p) / static_cast<double>(n))));
    }
}

TEST_CASE("same seed gives identical outcomes on any thread count")
{
    const auto c = reference_three_tier(0.5e6);
    const auto ef = optimize_equal_fractions(c);
    auto s = drops(300, 99, 1);
    s.load_mode = SimLoadMode::ActualCount;
    const auto a = simulate_coverage(c, ef.alloc, s);
    const auto b = simulate_coverage(c, ef.alloc, s);
    s.threads = 3;
    const auto t = simulate_coverage(c, ef.alloc, s);
    CHECK(a.coverage_estimate == b.coverage_estimate);
    CHECK(a.coverage_estimate == t.coverage_estimate);
    CHECK(a.per_tier_assoc_empirical == t.per_tier_assoc_empirical);
    s.threads = 1;
    s.seed = 100;
    const auto other = simulate_coverage(c, ef.alloc, s);
    CHECK(other.coverage_estimate != a.coverage_estimate);
}

TEST_CASE("biased association frequencies follow the analytic probabilities")
{
    auto c = reference_three_tier(1e6);
    c.tiers[1].bias = 8.0;
    c.tiers[2].bias = 40.0;
    const auto a = association_probabilities(c);
    const auto s = drops(20000, 5);
    // Allocation whose implied biases are the configured ones.
    const auto out = simulate_coverage(c, {a, a}, s);
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double sigma = std::sqrt(a[i] * (1 - a[i]) / 20000.0);
        CHECK(std::abs(out.per_tier_assoc_empirical[i] - a[i]) < 3.5 * sigma);
    }
}

TEST_CASE("serving distance follows the conditional law")
{
    const auto c = reference_three_tier(1e6);
    const auto s = drops(6000, 31);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto sample = simulate_assoc_distance(c, s, k);
        REQUIRE(sample.size() > 200);
        const double d = ks_statistic(sample, [&](double r) { return conditional_distance_cdf(c, k, r); });
        CHECK(d < ks_critical_value(sample.size(), 0.001));
    }
}

TEST_CASE("KS helpers")
{
    const std::vector<double> uniform = {0.1, 0.3, 0.5, 0.7, 0.9};
    CHECK(ks_statistic(uniform, [](double x) { return x; }) == doctest::Approx(0.1));
    CHECK(ks_critical_value(100, 0.05) == doctest::Approx(0.1358).epsilon(1e-3));
}

TEST_CASE("window validation")
{
    const auto c = reference_three_tier(1e6);
    SimConfig s;
    s.window_radius = 50.0;
    CHECK_THROWS_AS(s.validate(c), std::invalid_argument);
    s.window_radius = 1000.0;
    CHECK_NOTHROW(s.validate(c));
    s.num_drops = 0;
    CHECK_THROWS_AS(s.validate(c), std::invalid_argument);
    CHECK(SimConfig{}.radius_for(c) == doctest::Approx(10.0 / std::sqrt(M_PI * 0.0005)));
}
