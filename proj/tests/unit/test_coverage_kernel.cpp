#include <doctest.h>

#include "hetnet/coverage_kernel.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/validation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace hetnet;

namespace {

// Midpoint rule in s = ln u on [ln a, ln U] plus the first terms of the
// alternating tail series  int_U^inf du / (1 + u^b) = sum_n (-1)^n U^(1-b(n+1)) / (b(n+1) - 1).
double rho_riemann(double tau, double alpha, long panels)
{
    const double b = alpha / 2.0;
    const double lo = -std::log(tau) / b;
    const double hi = 30.0 * std::log(10.0) / b; // U^b = 1e30
    const double h = (hi - lo) / static_cast<double>(panels);
    long double sum = 0.0L;
    for (long i = 0; i < panels; ++i) {
        const double s = lo + (static_cast<double>(i) + 0.5) * h;
        sum += std::exp(s) / (1.0 + std::exp(b * s));
    }
    const double upper = std::exp(hi);
    double tail = 0.0;
    for (int n = 0; n < 4; ++n)
        tail += (n % 2 ? -1.0 : 1.0) * std::pow(upper, 1.0 - b * (n + 1)) / (b * (n + 1) - 1.0);
    return std::pow(tau, 2.0 / alpha) * (static_cast<double>(sum) * h + tail);
}

NetworkConfig one_tier(double rate, double alpha = 4.0)
{
    NetworkConfig c;
    c.user_density = 0.02;
    c.bandwidth = 1e7;
    c.path_loss_exponent = alpha;
    c.tiers = {{43.0, 0.001, 1.0, rate}};
    return c;
}

AllocationPair whole(std::size_t k = 1)
{
    const auto n = static_cast<Eigen::Index>(k);
    return {Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(k)),
            Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(k))};
}

} // namespace

TEST_CASE("quadrature on smooth and endpoint-singular integrands")
{
    const auto smooth = integrate_adaptive([](double x) { return std::exp(-x) * std::cos(3 * x); }, 0.0, 5.0);
    const double exact = (1.0 - std::exp(-5.0) * (std::cos(15.0) - 3 * std::sin(15.0))) / 10.0;
    CHECK(smooth.value == doctest::Approx(exact).epsilon(1e-13));
    const auto sqrt_sing = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(sqrt_sing.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("rho values")
{
    CHECK(rho(0.0, 3.0) == 0.0);
    CHECK(rho(0.0, 4.5) == 0.0);
    CHECK(rho(1.0, 4.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    CHECK(rho_uncached(3.0, 3.5) == doctest::Approx(rho_riemann(3.0, 3.5, 10'000'000)).epsilon(1e-8));
    CHECK(rho_uncached(1e-3, 2.5) == doctest::Approx(rho_riemann(1e-3, 2.5, 10'000'000)).epsilon(1e-8));
    CHECK_THROWS_AS(rho(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(rho(-1.0, 3.0), std::invalid_argument);
}

TEST_CASE("rho closed form at alpha = 4 over a wide range")
{
    for (int i = 0; i <= 60; ++i) {
        const double tau = std::pow(10.0, -8.0 + 14.0 * i / 60.0);
        const double exact = std::sqrt(tau) * std::atan(std::sqrt(tau));
        CHECK(rho_uncached(tau, 4.0) == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("cached and uncached rho agree bit for bit")
{
    clear_rho_cache();
    for (double tau : {0.1, 0.7, 3.0, 80.0}) {
        const double first = rho(tau, 3.7);
        CHECK(first == rho_uncached(tau, 3.7));
        CHECK(rho(tau, 3.7) == first);
    }
}

TEST_CASE("rho is strictly increasing")
{
    for (double alpha : {2.2, 3.0, 3.5, 4.0, 6.0}) {
        double prev = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double tau = std::pow(10.0, -6.0 + 10.0 * i / 80.0);
            const double r = rho(tau, alpha);
            CHECK(r > prev);
            prev = r;
        }
    }
}

TEST_CASE("rho derivative")
{
    CHECK(rho_dtau(1.0, 4.0) == doctest::Approx(0.5 * (std::numbers::pi / 4 + 0.5)).epsilon(1e-13));
    CHECK_THROWS_AS(rho_dtau(0.0, 4.0), std::invalid_argument);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lt(-4.0, 3.0);
    std::uniform_real_distribution<double> al(2.2, 6.0);
    for (int i = 0; i < 200; ++i) {
        const double tau = std::pow(10.0, lt(rng));
        const double alpha = al(rng);
        const double h = 1e-6 * std::max(tau, 1.0);
        const double fd = (rho_uncached(tau + h, alpha) - rho_uncached(tau - h, alpha)) / (2 * h);
        const double d = rho_dtau(tau, alpha);
        CHECK(d > 0.0);
        CHECK(std::abs(d - fd) / d < 1e-5);
    }
}

TEST_CASE("SIR thresholds")
{
    SUBCASE("empty tier has zero threshold")
    {
        const auto c = reference_three_tier(1e6);
        AllocationPair a{Eigen::Vector3d(0.0, 0.5, 0.5), Eigen::Vector3d(0.2, 0.4, 0.4)};
        CHECK(sir_threshold(c, a, 0, LoadModel::MeanLoad).tau == 0.0);
    }
    SUBCASE("one bit per hertz per user gives tau = 1")
    {
        auto c = one_tier(0.0);
        c.tiers[0].rate_threshold = c.bandwidth * c.tiers[0].density / c.user_density;
        CHECK(sir_threshold(c, whole(), 0, LoadModel::MeanLoad).tau == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("reference network tier 3 with A = w")
    {
        const auto c = reference_three_tier(1e6);
        const auto a = association_probabilities(c);
        const auto th = sir_threshold(c, {a, a}, 2, LoadModel::MeanLoad);
        CHECK(th.exponent == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(th.tau == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    }
    SUBCASE("huge demand is capped instead of overflowing")
    {
        const auto c = reference_three_tier(1e6);
        AllocationPair a{Eigen::Vector3d(0.4, 0.3, 0.3), Eigen::Vector3d(1e-9, 0.5, 0.5 - 1e-9)};
        const auto th = sir_threshold(c, a, 0, LoadModel::MeanLoad);
        CHECK(th.capped);
        const auto rep = rate_coverage(c, a, LoadModel::MeanLoad);
        CHECK(rep.per_tier_terms[0] == 0.0);
        CHECK(std::isfinite(rep.grad_spectrum[0]));
        CHECK(rep.grad_spectrum[0] >= 0.0);
    }
}

TEST_CASE("rate coverage")
{
    SUBCASE("single tier is 1 / (1 + rho)")
    {
        const auto c = one_tier(1e5, 4.0);
        const double tau = std::exp2(1e5 * 0.02 / (1e7 * 0.001)) - 1.0;
        const double expected = 1.0 / (1.0 + std::sqrt(tau) * std::atan(std::sqrt(tau)));
        CHECK(rate_coverage(c, whole(), LoadModel::MeanLoad).objective == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("vanishing rate threshold covers everyone")
    {
        CHECK(rate_coverage(one_tier(1e-9), whole(), LoadModel::MeanLoad).objective
              == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("bounds on random allocations")
    {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 300; ++i) {
            const std::size_t k = 1 + static_cast<std::size_t>(i % 4);
            const auto c = random_network(k, rng);
            const auto a = random_interior_allocation(k, rng, 0.0);
            for (auto model : {LoadModel::MeanLoad, LoadModel::HigherLoad}) {
                const auto rep = rate_coverage(c, a, model);
                CHECK(rep.objective >= 0.0);
                CHECK(rep.objective <= 1.0);
                CHECK((rep.per_tier_terms.array() <= a.assoc.array() + 1e-15).all());
            }
        }
    }
    SUBCASE("spectrum gradients are positive at the equal-fractions point")
    {
        const auto c = reference_three_tier(1e6);
        const auto ef = optimize_equal_fractions(c);
        CHECK((ef.report.grad_spectrum.array() > 0.0).all());
    }
    SUBCASE("empty tier contributes nothing and has zero spectrum gradient")
    {
        const auto c = reference_three_tier(1e6);
        AllocationPair a{Eigen::Vector3d(0.0, 0.5, 0.5), Eigen::Vector3d(0.2, 0.4, 0.4)};
        const auto rep = rate_coverage(c, a, LoadModel::MeanLoad);
        CHECK(rep.per_tier_terms[0] == 0.0);
        CHECK(rep.grad_spectrum[0] == 0.0);
    }
    SUBCASE("symmetric tiers have equal terms")
    {
        NetworkConfig c = one_tier(1e6, 3.5);
        c.tiers.push_back(c.tiers[0]);
        const auto rep = rate_coverage(c, whole(2), LoadModel::MeanLoad);
        CHECK(rep.per_tier_terms[0] == rep.per_tier_terms[1]);
    }
    SUBCASE("closed-form point beats the A = w grid")
    {
        const auto c = reference_three_tier(1e6);
        const int n = 200;
        double best = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                const Eigen::Vector3d a(i / double(n), j / double(n), (n - i - j) / double(n));
                best = std::max(best, rate_coverage(c, {a, a}, LoadModel::MeanLoad).objective);
            }
        const double ef = optimize_equal_fractions(c).report.objective;
        CHECK(ef >= best - 1e-12);
        CHECK(ef - best < 1e-3);
    }
    SUBCASE("assoc gradient tends to 1 as the threshold vanishes")
    {
        const auto g = grad_assoc(one_tier(1e-9), whole(), LoadModel::MeanLoad);
        CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("HigherLoad gradients match finite differences")
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(i % 3);
        const auto c = random_network(k, rng);
        const auto a = random_interior_allocation(k, rng);
        const auto rep = rate_coverage(c, a, LoadModel::HigherLoad);
        const auto direct = grad_assoc(c, a, LoadModel::HigherLoad);
        for (std::size_t t = 0; t < k; ++t) {
            const auto j = static_cast<Eigen::Index>(t);
            const double x = a.assoc[j];
            const double w = a.spectrum[j];
            auto f = [&](double aa, double ww) { return tier_term(c, aa, ww, t, LoadModel::HigherLoad).value; };
            const double fa = (f(x * (1 + 1e-6), w) - f(x * (1 - 1e-6), w)) / (2e-6 * x);
            const double fw = (f(x, w * (1 + 1e-6)) - f(x, w * (1 - 1e-6))) / (2e-6 * w);
            CHECK(std::abs(rep.grad_assoc[j] - fa) <= 1e-5 * std::abs(fa) + 1e-12);
            CHECK(std::abs(direct[j] - fa) <= 1e-5 * std::abs(fa) + 1e-12);
            CHECK(std::abs(rep.grad_spectrum[j] - fw) <= 1e-5 * std::abs(fw) + 1e-12);
        }
    }
}

TEST_CASE("reduced objective is concave in A")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::uniform_real_distribution<double> lt(-3.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double r = rho(std::pow(10.0, lt(rng)), 3.5);
        const double a = u(rng);
        const double h = 1e-3;
        auto f = [r](double x) { return x / (1.0 + x * r); };
        const double second = (f(a + h) - 2 * f(a) + f(a - h)) / (h * h);
        CHECK(second < 0.0);
        CHECK(second == doctest::Approx(-2 * r / std::pow(1 + a * r, 3)).epsilon(1e-4));
    }
}

TEST_CASE("KKT residual")
{
    CHECK(kkt_residual(one_tier(1e6), whole(), LoadModel::MeanLoad).value == 0.0);

    const auto c = reference_three_tier(1e6);
    const auto joint = optimize_joint(c, LoadModel::MeanLoad);
    CHECK(joint.kkt < 1e-6);

    AllocationPair off{Eigen::Vector3d(0.6, 0.2, 0.2), Eigen::Vector3d(0.1, 0.3, 0.6)};
    const auto res = kkt_residual(c, off, LoadModel::MeanLoad);
    CHECK(res.value > 1e-3);
    CHECK(res.active_tiers == 3);
    CHECK_FALSE(res.boundary);
}

TEST_CASE("connection-distance integral")
{
    SUBCASE("zero threshold, single tier integrates to 1")
    {
        CHECK(per_tier_coverage_integral(one_tier(1e-300), whole(), LoadModel::MeanLoad, 0)
              == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("reference network, every tier")
    {
        const auto c = reference_three_tier(1e6);
        const auto a = association_probabilities(c);
        AllocationPair alloc{a, Eigen::Vector3d(0.1, 0.2, 0.7)};
        const auto rep = rate_coverage(c, alloc, LoadModel::MeanLoad);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::abs(per_tier_coverage_integral(c, alloc, LoadModel::MeanLoad, k)
                           - rep.per_tier_terms[static_cast<Eigen::Index>(k)])
                  < 1e-8);
    }
}
