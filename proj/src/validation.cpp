#include "hetnet/validation.hpp"

#include "hetnet/coverage_kernel.hpp"
#include "hetnet/optimizers.hpp"
#include "hetnet/ppp_simulator.hpp"
#include "hetnet/simplex.hpp"
#include "hetnet/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hetnet {

namespace {

const std::vector<double> kSweepRates = {0.25e6, 0.5e6, 1e6, 2e6};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

template <typename Body>
CheckResult timed(std::string name, Body body)
{
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = std::move(name);
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

double relative_error(double approx, double exact)
{
    return std::abs(approx - exact) / std::max(std::abs(exact), 1e-300);
}

// Central difference of f_k along one coordinate.
double tier_value(const NetworkConfig& c, double a, double w, std::size_t k)
{
    return tier_term(c, a, w, k, LoadModel::MeanLoad).value;
}

struct SweepPoint
{
    double joint;
    double equal_fractions;
    double maxsir;
};

std::vector<SweepPoint> reference_sweep()
{
    std::vector<SweepPoint> out;
    for (double rate : kSweepRates) {
        const auto net = reference_three_tier(rate);
        out.push_back({optimize_joint(net, LoadModel::MeanLoad).report.objective,
                       optimize_equal_fractions(net).report.objective,
                       optimize_spectrum_maxsir(net, LoadModel::MeanLoad).report.objective});
    }
    return out;
}

} // namespace

NetworkConfig reference_three_tier(double r1, double r2, double r3, double bandwidth)
{
    NetworkConfig c;
    c.user_density = 0.05;
    c.bandwidth = bandwidth;
    c.path_loss_exponent = 3.5;
    c.tiers = {{46.0, 0.01 * c.user_density, 1.0, r1},
               {30.0, 0.05 * c.user_density, 1.0, r2},
               {20.0, 0.2 * c.user_density, 1.0, r3}};
    return c;
}

NetworkConfig reference_three_tier(double rate_threshold, double bandwidth)
{
    return reference_three_tier(rate_threshold, rate_threshold, rate_threshold, bandwidth);
}

NetworkConfig random_network(std::size_t k, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> power(15.0, 46.0);
    std::uniform_real_distribution<double> alpha(2.5, 5.0);
    NetworkConfig c;
    c.user_density = log_uniform(rng, 0.01, 0.1);
    c.bandwidth = 10e6;
    c.path_loss_exponent = alpha(rng);
    for (std::size_t i = 0; i < k; ++i) {
        TierParams t;
        t.power_dbm = power(rng);
        t.density = log_uniform(rng, 1e-4, 1e-2);
        t.bias = log_uniform(rng, 0.1, 10.0);
        t.rate_threshold = log_uniform(rng, 0.05, 2.0) * c.bandwidth * t.density / c.user_density;
        c.tiers.push_back(t);
    }
    return c;
}

AllocationPair random_interior_allocation(std::size_t k, std::mt19937_64& rng, double min_share)
{
    const auto n = static_cast<Eigen::Index>(k);
    auto draw = [&] {
        // Mixture keeps every entry >= min_share.
        const Eigen::VectorXd x = sample_simplex(n, rng);
        const double spare = 1.0 - min_share * static_cast<double>(k);
        Eigen::VectorXd v = (Eigen::VectorXd::Constant(n, min_share) + spare * x).eval();
        return (v / v.sum()).eval();
    };
    AllocationPair a;
    a.assoc = draw();
    a.spectrum = draw();
    return a;
}

CheckResult check_rho_closed_form()
{
    return timed("rho closed form at alpha=4 (100 log-spaced tau in [1e-6,1e4], rel err < 1e-8, < 1 s)",
                 [](CheckResult& r) {
        clear_rho_cache();
        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double tau = std::pow(10.0, -6.0 + 10.0 * i / 99.0);
            const double exact = std::sqrt(tau) * std::atan(std::sqrt(tau));
            worst = std::max(worst, relative_error(rho_uncached(tau, 4.0), exact));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.passed = worst < 1e-8 && secs < 1.0;
        r.detail = fmt("max rel err %.3e, %.3f s", worst, secs);
    });
}

CheckResult check_gradients_finite_difference()
{
    return timed("gradients vs central differences (1000 points, K in {2,3,4}, rel err < 1e-5, < 10 s)",
                 [](CheckResult& r) {
        std::mt19937_64 rng(20240601);
        double worst_w = 0.0;
        double worst_a = 0.0;
        double worst_rel = 0.0;
        for (int p = 0; p < 1000; ++p) {
            const std::size_t k = 2 + static_cast<std::size_t>(p % 3);
            const auto net = random_network(k, rng);
            const auto alloc = random_interior_allocation(k, rng);
            const auto gw = grad_spectrum(net, alloc, LoadModel::MeanLoad);
            const auto ga = grad_assoc(net, alloc, LoadModel::MeanLoad);
            const auto rep = rate_coverage(net, alloc, LoadModel::MeanLoad);
            for (std::size_t t = 0; t < k; ++t) {
                const auto i = static_cast<Eigen::Index>(t);
                const double a = alloc.assoc[i];
                const double w = alloc.spectrum[i];
                const double hw = 1e-6 * w;
                const double ha = 1e-6 * a;
                const double fd_w = (tier_value(net, a, w + hw, t) - tier_value(net, a, w - hw, t)) / (2 * hw);
                const double fd_a = (tier_value(net, a + ha, w, t) - tier_value(net, a - ha, w, t)) / (2 * ha);
                worst_w = std::max(worst_w, relative_error(gw[i], fd_w));
                worst_a = std::max(worst_a, relative_error(ga[i], fd_a));
                worst_rel = std::max(worst_rel, relative_error(rep.grad_assoc[i], fd_a));
            }
        }
        r.passed = worst_w < 1e-5 && worst_a < 1e-5 && worst_rel < 1e-5;
        r.detail = fmt("max rel err d/dw %.3e, d/dA %.3e, d/dA via relation %.3e", worst_w, worst_a, worst_rel);
    });
}

CheckResult check_gradient_relation()
{
    return timed("gradient relation dF/dA = 1/(1+A rho)^2 - (w/A) dF/dw (1000 points, residual < 1e-12)",
                 [](CheckResult& r) {
        std::mt19937_64 rng(20240601);
        double worst = 0.0;
        for (int p = 0; p < 1000; ++p) {
            const std::size_t k = 2 + static_cast<std::size_t>(p % 3);
            const auto net = random_network(k, rng);
            const auto alloc = random_interior_allocation(k, rng);
            const auto gw = grad_spectrum(net, alloc, LoadModel::MeanLoad);
            const auto ga = grad_assoc(net, alloc, LoadModel::MeanLoad);
            for (std::size_t t = 0; t < k; ++t) {
                const auto i = static_cast<Eigen::Index>(t);
                const double tau = sir_threshold(net, alloc, t, LoadModel::MeanLoad).tau;
                const double s = 1.0 + alloc.assoc[i] * rho(tau, net.path_loss_exponent);
                const double rhs = 1.0 / (s * s) - alloc.spectrum[i] / alloc.assoc[i] * gw[i];
                worst = std::max(worst, std::abs(ga[i] - rhs));
            }
        }
        r.passed = worst < 1e-12;
        r.detail = fmt("max residual %.3e", worst);
    });
}

CheckResult check_coverage_integral()
{
    return timed("connection-distance integral equals closed-form tier term (100 configs, < 1e-8)",
                 [](CheckResult& r) {
        std::mt19937_64 rng(777);
        double worst = 0.0;
        for (int p = 0; p < 100; ++p) {
            const std::size_t k = 1 + static_cast<std::size_t>(p % 4);
            const auto net = random_network(k, rng);
            AllocationPair alloc = random_interior_allocation(k, rng);
            alloc.assoc = association_probabilities(net);
            const auto rep = rate_coverage(net, alloc, LoadModel::MeanLoad);
            for (std::size_t t = 0; t < k; ++t) {
                const double integral = per_tier_coverage_integral(net, alloc, LoadModel::MeanLoad, t);
                worst = std::max(worst, std::abs(integral - rep.per_tier_terms[static_cast<Eigen::Index>(t)]));
            }
        }
        r.passed = worst < 1e-8;
        r.detail = fmt("max abs diff %.3e", worst);
    });
}

CheckResult check_closed_form_stationarity()
{
    return timed("equal-fractions closed form is stationary (spread of 1/(1+A rho)^2 < 1e-10, sum A = 1 to 1e-12)",
                 [](CheckResult& r) {
        std::vector<NetworkConfig> nets;
        for (double rate : kSweepRates)
            nets.push_back(reference_three_tier(rate));
        std::mt19937_64 rng(99);
        for (int p = 0; p < 50; ++p)
            nets.push_back(random_network(2 + static_cast<std::size_t>(p % 3), rng));

        double spread = 0.0;
        double sum_err = 0.0;
        for (const auto& net : nets) {
            const auto res = optimize_equal_fractions(net);
            double lo = 1e300;
            double hi = -1e300;
            for (std::size_t t = 0; t < net.num_tiers(); ++t) {
                const auto& tier = net.tiers[t];
                const double tau_bar =
                    std::exp2(tier.rate_threshold * net.user_density / (net.bandwidth * tier.density)) - 1.0;
                const double s = 1.0 + res.alloc.assoc[static_cast<Eigen::Index>(t)]
                                           * rho(tau_bar, net.path_loss_exponent);
                lo = std::min(lo, 1.0 / (s * s));
                hi = std::max(hi, 1.0 / (s * s));
            }
            spread = std::max(spread, hi - lo);
            sum_err = std::max(sum_err, std::abs(res.alloc.assoc.sum() - 1.0));
            sum_err = std::max(sum_err, std::abs(res.alloc.spectrum.sum() - 1.0));
        }
        r.passed = spread < 1e-10 && sum_err < 1e-12;
        r.detail = fmt("max spread %.3e, max |sum - 1| %.3e", spread, sum_err);
    });
}

CheckResult check_oracle_equivalence()
{
    return timed("joint optimizer vs brute force on the reference sweep (>= grid(0.01) - 1e-6, <= grid(0.005) + 1e-3, < 5 min)",
                 [](CheckResult& r) {
        bool ok = true;
        std::ostringstream detail;
        for (double rate : kSweepRates) {
            const auto net = reference_three_tier(rate);
            const double joint = optimize_joint(net, LoadModel::MeanLoad).report.objective;
            const double coarse = brute_force(net, LoadModel::MeanLoad, 0.01).report.objective;
            const double fine = brute_force(net, LoadModel::MeanLoad, 0.005).report.objective;
            ok = ok && joint >= coarse - 1e-6 && joint <= fine + 1e-3;
            detail << fmt("R=%.2g: joint %.6f grid.01 %.6f ", rate, joint, coarse)
                   << fmt("grid.005 %.6f; ", fine);
        }
        r.passed = ok;
        r.detail = detail.str();
    });
}

CheckResult check_equal_fractions_gap()
{
    return timed("equal-fractions within 0.01 of joint at every sweep threshold", [](CheckResult& r) {
        double worst = 0.0;
        for (const auto& p : reference_sweep())
            worst = std::max(worst, std::abs(p.joint - p.equal_fractions));
        r.passed = worst <= 0.01;
        r.detail = fmt("max |joint - equal_fractions| %.3e", worst);
    });
}

CheckResult check_maxsir_inferiority()
{
    return timed("max-SIR spectrum-only strictly below joint, gap > 0.02 somewhere", [](CheckResult& r) {
        bool below = true;
        double gap = 0.0;
        for (const auto& p : reference_sweep()) {
            below = below && p.maxsir < p.joint;
            gap = std::max(gap, p.joint - p.maxsir);
        }
        r.passed = below && gap > 0.02;
        r.detail = std::string("strictly below: ") + (below ? "yes" : "no") + fmt(", max gap %.4f", gap);
    });
}

CheckResult check_monte_carlo(int threads)
{
    return timed("Monte Carlo agrees with closed form (2e4 drops) and association (1e5 drops, 3 sigma), < 2 min",
                 [threads](CheckResult& r) {
        const auto net = reference_three_tier(1e6);
        const auto ef = optimize_equal_fractions(net);
        SimConfig sim;
        sim.num_drops = 20000;
        sim.seed = 2024;
        sim.threads = threads;
        const auto mc = simulate_coverage(net, ef.alloc, sim);
        const double analytic = ef.report.objective;
        const double tol = std::max(0.02, 3.0 * mc.std_error);
        const bool coverage_ok = std::abs(mc.coverage_estimate - analytic) < tol;

        const Eigen::VectorXd a = association_probabilities(net);
        sim.num_drops = 100000;
        sim.seed = 4048;
        const auto assoc_mc = simulate_coverage(net, {a, a}, sim);
        double worst_sigma = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double sigma = std::sqrt(a[i] * (1.0 - a[i]) / static_cast<double>(sim.num_drops));
            worst_sigma = std::max(worst_sigma, std::abs(assoc_mc.per_tier_assoc_empirical[i] - a[i]) / sigma);
        }
        r.passed = coverage_ok && worst_sigma < 3.0;
        r.detail = fmt("simulated %.4f vs analytic %.4f (tol %.4f); ", mc.coverage_estimate, analytic, tol)
                 + fmt("worst association deviation %.2f sigma", worst_sigma);
    });
}

CheckResult check_offloading_direction()
{
    return timed("raising R_2 alone lowers optimized A_2 and w_2 monotonically", [](CheckResult& r) {
        const std::vector<double> r2 = {0.25e6, 0.5e6, 1e6, 2e6, 4e6};
        double prev_a = 2.0;
        double prev_w = 2.0;
        bool monotone = true;
        double sum_err = 0.0;
        std::ostringstream detail;
        for (double v : r2) {
            const auto res = optimize_joint(reference_three_tier(0.5e6, v, 1e6), LoadModel::MeanLoad);
            const double a2 = res.alloc.assoc[1];
            const double w2 = res.alloc.spectrum[1];
            monotone = monotone && a2 < prev_a && w2 < prev_w;
            prev_a = a2;
            prev_w = w2;
            sum_err = std::max({sum_err, std::abs(res.alloc.assoc.sum() - 1.0),
                                std::abs(res.alloc.spectrum.sum() - 1.0)});
            detail << fmt("R2=%.2g: A2 %.4f w2 %.4f; ", v, a2, w2);
        }
        r.passed = monotone && sum_err < 1e-12;
        r.detail = detail.str() + fmt("max |sum - 1| %.2e", sum_err);
    });
}

CheckResult check_determinism(int threads)
{
    return timed("identical seeds give byte-identical CSV", [threads](CheckResult& r) {
        const auto net = reference_three_tier(1e6);
        SweepSpec spec;
        spec.values = {0.5e6, 1e6};
        spec.modes = {SweepMode::Joint, SweepMode::EqualFractions, SweepMode::MaxSirSpectrumOnly};
        SolveOptions opts;
        SimConfig sim;
        sim.num_drops = 2000;
        sim.seed = 99;
        const auto first = to_csv(run_sweep(net, spec, opts, &sim, 1));
        const auto second = to_csv(run_sweep(net, spec, opts, &sim, 1));
        const auto parallel = to_csv(run_sweep(net, spec, opts, &sim, std::max(2, threads)));
        r.passed = first == second && first == parallel;
        r.detail = std::string("repeat identical: ") + (first == second ? "yes" : "no")
                 + ", threaded identical: " + (first == parallel ? "yes" : "no");
    });
}

std::vector<ValidationCheck> validation_checks(int threads)
{
    return {
        {"rho_closed_form", check_rho_closed_form},
        {"gradient_finite_difference", check_gradients_finite_difference},
        {"gradient_relation", check_gradient_relation},
        {"coverage_integral", check_coverage_integral},
        {"closed_form_stationarity", check_closed_form_stationarity},
        {"oracle_equivalence", check_oracle_equivalence},
        {"equal_fractions_gap", check_equal_fractions_gap},
        {"maxsir_inferiority", check_maxsir_inferiority},
        {"monte_carlo", [threads] { return check_monte_carlo(threads); }},
        {"offloading_direction", check_offloading_direction},
        {"determinism", [threads] { return check_determinism(threads); }},
    };
}

} // namespace hetnet
