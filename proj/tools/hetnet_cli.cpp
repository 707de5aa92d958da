// hetnet: rate coverage optimization and simulation for K-tier networks.
//
//   hetnet optimize --config net.json [--mode joint,equal_fractions] [--format json]
//   hetnet sweep    --config net.json --out sweep.csv --threads 4
//   hetnet simulate --config net.json --assoc 0.4,0.3,0.3 --spectrum 0.4,0.3,0.3
//   hetnet validate
//
// Exit status: 0 ok, 1 invalid input or failed validation, 2 optimize did not converge.

#include "hetnet/config_io.hpp"
#include "hetnet/coverage_kernel.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/ppp_simulator.hpp"
#include "hetnet/sweep.hpp"
#include "hetnet/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hetnet;
using nlohmann::json;

struct Common
{
    std::string config;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::optional<double> grid_step;
    std::vector<std::string> modes;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true)
{
    auto* opt = cmd->add_option("--config", c.config, "scenario JSON file")->check(CLI::ExistingFile);
    if (needs_config)
        opt->required();
    cmd->add_option("--out", c.out, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", c.seed, "seed for solver restarts and Monte Carlo");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

void add_solver_flags(CLI::App* cmd, Common& c)
{
    cmd->add_option("--grid-step", c.grid_step, "brute-force lattice spacing")->check(CLI::PositiveNumber);
    cmd->add_option("--mode", c.modes,
                    "comma-separated modes: joint, equal_fractions, maxsir, brute_force, joint_hl")
        ->delimiter(',');
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string render(const SweepTable& table, const std::string& format)
{
    return format == "json" ? to_json(table).dump(2) + "\n" : to_csv(table);
}

Scenario load(const Common& c)
{
    Scenario sc = load_config(c.config);
    if (c.seed) {
        sc.solver.seed = *c.seed;
        if (sc.simulation)
            sc.simulation->seed = *c.seed;
    }
    if (c.grid_step)
        sc.solver.grid_step = *c.grid_step;
    sc.solver.threads = c.threads;
    sc.solver.validate();
    if (sc.simulation)
        sc.simulation->threads = c.threads;
    return sc;
}

std::vector<SweepMode> modes_or(const Common& c, std::vector<SweepMode> fallback)
{
    if (c.modes.empty())
        return fallback;
    std::vector<SweepMode> out;
    for (const auto& m : c.modes)
        out.push_back(parse_sweep_mode(m));
    return out;
}

int run_optimize(const Common& c)
{
    const Scenario sc = load(c);
    SweepTable table;
    table.num_tiers = sc.network.num_tiers();
    const SimConfig* sim = sc.simulation ? &*sc.simulation : nullptr;
    table.provenance = {config_hash(sc.network), sc.solver.seed, sc.solver.tolerance};
    bool converged = true;
    for (SweepMode mode : modes_or(c, {SweepMode::Joint})) {
        table.rows.push_back(solve_row(sc.network, mode, sc.solver, sim));
        converged = converged && table.rows.back().converged;
    }
    emit(render(table, c.format), c.out);
    return converged ? 0 : 2;
}

int run_sweep_cmd(const Common& c)
{
    const Scenario sc = load(c);
    if (!sc.sweep)
        throw ConfigError("sweep", "config has no sweep section");
    SweepSpec spec = *sc.sweep;
    spec.modes = modes_or(c, spec.modes);
    const SimConfig* sim = sc.simulation ? &*sc.simulation : nullptr;
    emit(render(run_sweep(sc.network, spec, sc.solver, sim, c.threads), c.format), c.out);
    return 0;
}

Eigen::VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int run_simulate(const Common& c, const std::vector<double>& assoc, const std::vector<double>& spectrum,
                 std::optional<std::int64_t> drops, const std::string& load_mode)
{
    const Scenario sc = load(c);
    SimConfig sim = sc.simulation.value_or(SimConfig{});
    sim.threads = c.threads;
    if (c.seed)
        sim.seed = *c.seed;
    if (drops)
        sim.num_drops = *drops;
    if (load_mode == "actual_count")
        sim.load_mode = SimLoadMode::ActualCount;
    else if (load_mode == "analytic_average")
        sim.load_mode = SimLoadMode::AnalyticAverage;
    sim.validate(sc.network);

    // Without an explicit allocation, simulate the equal-fractions solution.
    AllocationPair alloc = optimize_equal_fractions(sc.network).alloc;
    if (!assoc.empty())
        alloc.assoc = to_vector(assoc);
    if (!spectrum.empty())
        alloc.spectrum = to_vector(spectrum);
    alloc.validate(sc.network.num_tiers(), 1e-9);

    const SimOutcome mc = simulate_coverage(sc.network, alloc, sim);
    const double analytic = rate_coverage(sc.network, alloc, sim.load_model).objective;
    const std::size_t k = sc.network.num_tiers();

    std::ostringstream out;
    if (c.format == "json") {
        auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
        json doc = {{"coverage_estimate", mc.coverage_estimate},
                    {"std_error", mc.std_error},
                    {"analytic", analytic},
                    {"assoc", vec(alloc.assoc)},
                    {"spectrum", vec(alloc.spectrum)},
                    {"assoc_empirical", vec(mc.per_tier_assoc_empirical)},
                    {"per_tier_coverage", vec(mc.per_tier_coverage)},
                    {"drops", mc.drops},
                    {"empty_drops", mc.empty_drops},
                    {"seed", mc.seed},
                    {"config_hash", config_hash(sc.network)}};
        out << doc.dump(2) << "\n";
    } else {
        char buf[64];
        auto f = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return std::string(buf);
        };
        out << "tier,assoc,spectrum,assoc_empirical,coverage\n";
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            out << i + 1 << ',' << f(alloc.assoc[j]) << ',' << f(alloc.spectrum[j]) << ','
                << f(mc.per_tier_assoc_empirical[j]) << ',' << f(mc.per_tier_coverage[j]) << '\n';
        }
        out << "total,1,1,," << f(mc.coverage_estimate) << '\n';
        out << "# std_error=" << f(mc.std_error) << " analytic=" << f(analytic) << " drops=" << mc.drops
            << " empty_drops=" << mc.empty_drops << " seed=" << mc.seed
            << " config_hash=" << config_hash(sc.network) << '\n';
    }
    emit(out.str(), c.out);
    return 0;
}

int run_validate(const Common& c, const std::vector<std::string>& only)
{
    if (!c.config.empty())
        load(c);
    int failures = 0;
    std::ostringstream out;
    for (const auto& check : validation_checks(c.threads)) {
        if (!only.empty() && std::find(only.begin(), only.end(), check.name) == only.end())
            continue;
        const auto r = check.run();
        failures += r.passed ? 0 : 1;
        char head[64];
        std::snprintf(head, sizeof head, "%s  %-28s %8.2f s  ", r.passed ? "PASS" : "FAIL",
                      check.name.c_str(), r.seconds);
        out << head << r.detail << '\n';
        if (c.out.empty()) {
            std::cout << out.str() << std::flush;
            out.str("");
        }
    }
    if (!c.out.empty())
        emit(out.str(), c.out);
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rate coverage optimization for multi-tier networks"};
    app.require_subcommand(1);

    Common common;

    auto* optimize = app.add_subcommand("optimize", "solve one network");
    add_common(optimize, common);
    add_solver_flags(optimize, common);

    auto* sweep = app.add_subcommand("sweep", "run the sweep section of a config");
    add_common(sweep, common);
    add_solver_flags(sweep, common);

    std::vector<double> assoc;
    std::vector<double> spectrum;
    std::optional<std::int64_t> drops;
    std::string load_mode;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage at an allocation");
    add_common(simulate, common);
    simulate->add_option("--assoc", assoc, "association fractions A_k")->delimiter(',');
    simulate->add_option("--spectrum", spectrum, "spectrum fractions w_k")->delimiter(',');
    simulate->add_option("--drops", drops, "number of drops")->check(CLI::PositiveNumber);
    simulate->add_option("--load-mode", load_mode, "analytic_average or actual_count")
        ->check(CLI::IsMember({"analytic_average", "actual_count"}));

    std::vector<std::string> only;
    auto* validate = app.add_subcommand("validate", "run the numerical and statistical checks");
    add_common(validate, common, false);
    validate->add_option("--check", only, "run only these checks")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*optimize)
            return run_optimize(common);
        if (*sweep)
            return run_sweep_cmd(common);
        if (*simulate)
            return run_simulate(common, assoc, spectrum, drops, load_mode);
        return run_validate(common, only);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
