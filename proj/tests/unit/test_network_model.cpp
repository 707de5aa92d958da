#include <doctest.h>

#include "hetnet/network_model.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/validation.hpp"

#include <cmath>
#include <random>

using namespace hetnet;

namespace {

NetworkConfig identical_tiers(std::size_t k, double alpha = 3.5)
{
    NetworkConfig c;
    c.user_density = 0.05;
    c.bandwidth = 1e7;
    c.path_loss_exponent = alpha;
    c.tiers.assign(k, TierParams{30.0, 0.001, 1.0, 1e6});
    return c;
}

// Association probability written directly as the ratio of weights
// lambda_k (P_k B_k)^(2/alpha), with no log-domain tricks.
Eigen::VectorXd naive_association(const NetworkConfig& c)
{
    Eigen::VectorXd a(static_cast<Eigen::Index>(c.num_tiers()));
    for (std::size_t i = 0; i < c.num_tiers(); ++i) {
        const auto& t = c.tiers[i];
        const double watts = std::pow(10.0, (t.power_dbm - 30.0) / 10.0);
        a[static_cast<Eigen::Index>(i)] = t.density * std::pow(watts * t.bias, 2.0 / c.path_loss_exponent);
    }
    return a / a.sum();
}

} // namespace

TEST_CASE("dBm conversion")
{
    CHECK(TierParams{30.0, 1.0, 1.0, 1.0}.linear_power() == doctest::Approx(1.0));
    CHECK(TierParams{46.0, 1.0, 1.0, 1.0}.linear_power() == doctest::Approx(39.8107170553));
}

TEST_CASE("association of a single tier is 1")
{
    auto c = identical_tiers(1);
    c.tiers[0].power_dbm = 12.0;
    c.tiers[0].bias = 7.0;
    const auto a = association_probabilities(c);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == 1.0);
}

TEST_CASE("identical tiers split users evenly")
{
    const auto a = association_probabilities(identical_tiers(3));
    for (Eigen::Index i = 0; i < 3; ++i)
        CHECK(a[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("reference network association matches the direct ratio")
{
    const auto c = reference_three_tier(1e6);
    const auto a = association_probabilities(c);
    const auto b = naive_association(c);
    for (Eigen::Index i = 0; i < 3; ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
    CHECK(a[0] == doctest::Approx(0.44195).epsilon(1e-4));
}

TEST_CASE("association properties on random networks")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + static_cast<std::size_t>(trial % 5);
        const auto c = random_network(k, rng);
        const auto a = association_probabilities(c);
        CHECK(std::abs(a.sum() - 1.0) < 1e-14);

        auto scaled = c;
        const double s = scale(rng);
        for (auto& t : scaled.tiers)
            t.bias *= s;
        CHECK((association_probabilities(scaled) - a).cwiseAbs().maxCoeff() < 1e-14);

        if (k > 1) {
            auto boosted = c;
            const std::size_t j = static_cast<std::size_t>(trial) % k;
            boosted.tiers[j].bias *= 1.5;
            const auto b = association_probabilities(boosted);
            for (std::size_t i = 0; i < k; ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                if (i == j)
                    CHECK(b[ii] > a[ii]);
                else
                    CHECK(b[ii] < a[ii]);
            }
        }

        const auto biases = biases_for_association(c, a);
        CHECK(biases.minCoeff() == doctest::Approx(1.0));
        const auto back = association_probabilities(with_biases(c, biases));
        CHECK((back - a).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("bias inversion")
{
    SUBCASE("unit biases are a fixed point")
    {
        const auto c = reference_three_tier(1e6);
        const auto b = biases_for_association(c, association_probabilities(c));
        for (Eigen::Index i = 0; i < 3; ++i)
            CHECK(b[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("two identical tiers, 3:1 split")
    {
        const auto c = identical_tiers(2, 3.5);
        Eigen::Vector2d target(0.75, 0.25);
        const auto b = biases_for_association(c, target);
        CHECK(b[0] / b[1] == doctest::Approx(std::pow(3.0, 1.75)).epsilon(1e-12));
    }
    SUBCASE("optimizer output round-trips")
    {
        const auto c = reference_three_tier(1e6);
        const auto target = optimize_joint(c, LoadModel::MeanLoad).alloc.assoc;
        const auto back = association_probabilities(with_biases(c, biases_for_association(c, target)));
        CHECK((back - target).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("zero target is rejected, implied biases mark it with 0")
    {
        const auto c = identical_tiers(2);
        Eigen::Vector2d target(1.0, 0.0);
        CHECK_THROWS_AS(biases_for_association(c, target), std::invalid_argument);
        const auto b = implied_biases(c, target);
        CHECK(b[0] == 1.0);
        CHECK(b[1] == 0.0);
    }
}

TEST_CASE("loads")
{
    NetworkConfig c = identical_tiers(2);
    c.tiers[0].density = 0.0025;
    CHECK(tier_load(c, 0.4, 0, LoadModel::MeanLoad) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(tier_load(c, 0.0, 0, LoadModel::MeanLoad) == 0.0);
    CHECK(tier_load(c, 0.0, 0, LoadModel::HigherLoad) == 1.0);
    CHECK(tier_load(c, 0.4, 0, LoadModel::HigherLoad) == doctest::Approx(1.0 + 1.28 * 8.0));
    CHECK(tier_load_slope(c, 0, LoadModel::MeanLoad) == doctest::Approx(20.0));
    CHECK(tier_load_slope(c, 0, LoadModel::HigherLoad) == doctest::Approx(25.6));
}

TEST_CASE("density ordering is a permutation round trip")
{
    NetworkConfig c = reference_three_tier(1e6);
    std::swap(c.tiers[0], c.tiers[2]);
    DensityOrder order;
    const auto sorted = sorted_by_density(c, &order);
    for (std::size_t i = 1; i < sorted.num_tiers(); ++i)
        CHECK(sorted.tiers[i - 1].density <= sorted.tiers[i].density);
    Eigen::Vector3d v(1.0, 2.0, 3.0);
    CHECK(order.to_input_order(order.to_sorted_order(v)) == v);
}

TEST_CASE("validation names the offending field")
{
    auto c = identical_tiers(3);
    c.tiers[1].density = -1.0;
    try {
        c.validate();
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).rfind("tiers[1].density", 0) == 0);
    }

    auto d = identical_tiers(2);
    d.path_loss_exponent = 2.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);

    AllocationPair off{Eigen::Vector2d(0.6, 0.6), Eigen::Vector2d(0.5, 0.5)};
    CHECK_THROWS_AS(off.validate(2), std::invalid_argument);
    AllocationPair wrong_size{Eigen::Vector3d(0.2, 0.3, 0.5), Eigen::Vector2d(0.5, 0.5)};
    CHECK_THROWS_AS(wrong_size.validate(2), std::invalid_argument);
}
