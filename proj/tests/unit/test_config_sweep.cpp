#include <doctest.h>

#include "hetnet/config_io.hpp"
#include "hetnet/coverage_kernel.hpp"
#include "hetnet/sweep.hpp"

#include <cmath>
#include <string>

using namespace hetnet;
using nlohmann::json;

namespace {

json minimal()
{
    return json::parse(R"({
        "tiers": [{"power_dbm": 43, "density": 0.001, "rate_threshold": 1e6}],
        "user_density": 0.02, "bandwidth": 1e7, "path_loss_exponent": 4
    })");
}

std::string error_path(const json& doc)
{
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("minimal config loads with defaults")
{
    const auto sc = parse_scenario(minimal());
    REQUIRE(sc.network.num_tiers() == 1);
    CHECK(sc.network.tiers[0].bias == 1.0);
    CHECK(sc.solver.tolerance == SolveOptions{}.tolerance);
    CHECK(sc.solver.restarts == SolveOptions{}.restarts);
    CHECK_FALSE(sc.sweep.has_value());
    CHECK_FALSE(sc.simulation.has_value());
}

TEST_CASE("shipped three-tier config")
{
    const auto sc = load_config(HETNET_CONFIG_DIR "/threetier.json");
    const auto& n = sc.network;
    CHECK(n.user_density == 0.05);
    CHECK(n.path_loss_exponent == 3.5);
    CHECK(n.bandwidth == 1e7);
    const double densities[] = {0.0005, 0.0025, 0.01};
    const double powers[] = {46, 30, 20};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(n.tiers[i].density == doctest::Approx(densities[i]));
        CHECK(n.tiers[i].power_dbm == powers[i]);
    }
    REQUIRE(sc.sweep);
    CHECK(sc.sweep->values.size() == 4);
    CHECK(sc.simulation->num_drops == 20000);
}

TEST_CASE("schema errors carry field paths")
{
    auto doc = minimal();
    doc["tiers"].push_back({{"power_dbm", 30}, {"density", -0.01}, {"rate_threshold", 1e6}});
    CHECK(error_path(doc) == "tiers[1].density");

    doc = minimal();
    doc["tiers"][0]["colour"] = "red";
    CHECK(error_path(doc) == "tiers[0].colour");

    doc = minimal();
    doc.erase("bandwidth");
    CHECK(error_path(doc) == "bandwidth");

    doc = minimal();
    doc["path_loss_exponent"] = 2;
    CHECK(error_path(doc) == "path_loss_exponent");

    doc = minimal();
    doc["sweep"] = {{"values", {2e6, 1e6}}, {"modes", {"joint"}}};
    CHECK(error_path(doc) == "sweep");

    doc = minimal();
    doc["sweep"] = {{"values", {1e6}}, {"modes", {"newton"}}};
    CHECK(error_path(doc) == "sweep.modes[0]");

    doc = minimal();
    doc["sweep"] = {{"variable", "one_tier"}, {"tier", 3}, {"values", {1e6}}, {"modes", {"joint"}}};
    CHECK(error_path(doc) == "sweep.tier");

    doc = minimal();
    doc["solver"] = {{"grid_step", 2.0}};
    CHECK(error_path(doc) == "solver.grid_step");

    doc = minimal();
    doc["simulation"] = {{"window_radius", 5.0}};
    CHECK(error_path(doc) == "simulation.window_radius");

    CHECK_THROWS_AS(load_config("/nonexistent/net.json"), ConfigError);
}

TEST_CASE("single-tier sweep row")
{
    const auto net = parse_scenario(minimal()).network;
    SweepSpec spec;
    spec.values = {2e6};
    spec.modes = {SweepMode::Joint};
    const auto table = run_sweep(net, spec, {}, nullptr);
    REQUIRE(table.rows.size() == 1);
    const double tau = std::exp2(2e6 * 0.02 / (1e7 * 0.001)) - 1.0;
    CHECK(table.rows[0].objective == doctest::Approx(1.0 / (1.0 + rho(tau, 4.0))).epsilon(1e-12));
    CHECK(*table.rows[0].threshold == 2e6);
}

TEST_CASE("sweep tables")
{
    const auto sc = load_config(HETNET_CONFIG_DIR "/offload_r2.json");
    SweepSpec spec = *sc.sweep;
    spec.modes = {SweepMode::Joint, SweepMode::EqualFractions, SweepMode::JointHigherLoad};
    SimConfig sim;
    sim.num_drops = 500;
    const auto table = run_sweep(sc.network, spec, sc.solver, &sim, 2);

    SUBCASE("one row per value and mode, in order")
    {
        REQUIRE(table.rows.size() == spec.values.size() * spec.modes.size());
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            CHECK(*table.rows[i].threshold == spec.values[i / 3]);
            CHECK(table.rows[i].mode == spec.modes[i % 3]);
            CHECK(table.rows[i].mc_estimate.has_value());
        }
        CHECK(table.provenance.config_hash == config_hash(sc.network));
        CHECK(table.provenance.seed == sc.solver.seed);
    }
    SUBCASE("only the chosen tier's threshold moves")
    {
        const auto moved = apply_threshold(sc.network, spec, 3e6);
        CHECK(moved.tiers[1].rate_threshold == 3e6);
        CHECK(moved.tiers[0].rate_threshold == sc.network.tiers[0].rate_threshold);
    }
    SUBCASE("CSV round trip")
    {
        const std::string csv = to_csv(table);
        CHECK(csv.rfind("threshold,mode,objective,A_1,A_2,A_3,w_1,w_2,w_3,B_1,B_2,B_3,converged,mc_estimate,mc_stderr,", 0) == 0);
        const auto back = parse_results_csv(csv);
        REQUIRE(back.rows.size() == table.rows.size());
        CHECK(to_csv(back) == csv);
        for (std::size_t i = 0; i < back.rows.size(); ++i)
            CHECK(back.rows[i].objective == doctest::Approx(table.rows[i].objective).epsilon(1e-9));
    }
    SUBCASE("JSON round trip")
    {
        const auto doc = to_json(table);
        const auto back = parse_results_json(json::parse(doc.dump()));
        CHECK(to_json(back) == doc);
    }
    SUBCASE("tampered results fail revalidation")
    {
        auto doc = to_json(table);
        doc[0]["assoc"][0] = 0.9;
        CHECK_THROWS_AS(parse_results_json(doc), ConfigError);
        CHECK_THROWS_AS(parse_results_csv("threshold,mode\n1,joint\n"), ConfigError);
    }
}

TEST_CASE("solver failures become NaN rows")
{
    auto net = parse_scenario(minimal()).network;
    net.tiers.push_back(net.tiers[0]);
    SweepSpec spec;
    spec.values = {1e6};
    spec.modes = {SweepMode::BruteForce};
    SolveOptions opts;
    opts.grid_step = 0.3; // not a divisor of 1
    const auto table = run_sweep(net, spec, opts, nullptr);
    REQUIRE(table.rows.size() == 1);
    CHECK(std::isnan(table.rows[0].objective));
    CHECK_FALSE(table.rows[0].converged);
    const auto back = parse_results_csv(to_csv(table));
    CHECK(std::isnan(back.rows[0].objective));
}

TEST_CASE("config hash is stable and sensitive")
{
    auto net = parse_scenario(minimal()).network;
    const auto h = config_hash(net);
    CHECK(h.size() == 16);
    CHECK(config_hash(net) == h);
    net.tiers[0].rate_threshold *= 1.0000001;
    CHECK(config_hash(net) != h);
}
