#include "hetnet/optimizers.hpp"

#include "hetnet/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace hetnet {

namespace {

// Coordinates are kept at or above this during line search so the gradients
// stay finite.
constexpr double kFloor = 1e-9;
// A tier whose share sits on the floor this many iterations in a row is frozen at 0.
constexpr int kFreezeAfter = 50;
constexpr double kArmijo = 1e-4;
constexpr std::uint64_t kMaxLatticePoints = 10'000'000;

struct Point
{
    Eigen::VectorXd assoc;
    Eigen::VectorXd spectrum;
    std::vector<bool> frozen;
};

struct Gradient
{
    double objective = 0.0;
    Eigen::VectorXd assoc;
    Eigen::VectorXd spectrum;
};

struct LocalResult
{
    Point point;
    double objective = 0.0;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

class Ascent
{
public:
    Ascent(const NetworkConfig& config, LoadModel model, const SolveOptions& opts,
           bool assoc_fixed)
        : config_(config), model_(model), opts_(opts), assoc_fixed_(assoc_fixed),
          k_(static_cast<Eigen::Index>(config.num_tiers()))
    {
    }

    LocalResult run(const Eigen::VectorXd& assoc0, const Eigen::VectorXd& spectrum0) const;

private:
    Gradient evaluate(const Point& p) const;
    double residual(const Point& p, const Gradient& g) const;
    Eigen::VectorXd step_on_simplex(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                    double t, const std::vector<bool>& frozen) const;
    bool newton_polish(Point& p, Gradient& g, int& iterations) const;
    int active_count(const Point& p) const;
    bool at_floor(const Point& p, Eigen::Index i) const;
    bool freeze_floor(Point& p, const std::function<bool(int)>& eligible) const;

    const NetworkConfig& config_;
    LoadModel model_;
    const SolveOptions& opts_;
    bool assoc_fixed_;
    Eigen::Index k_;
};

Gradient Ascent::evaluate(const Point& p) const
{
    Gradient g;
    g.assoc.resize(k_);
    g.spectrum.resize(k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
        const auto t = tier_term(config_, p.assoc[i], p.spectrum[i], static_cast<std::size_t>(i),
                                 model_);
        g.objective += t.value;
        g.assoc[i] = t.grad_assoc;
        g.spectrum[i] = t.grad_spectrum;
    }
    return g;
}

double Ascent::residual(const Point& p, const Gradient& g) const
{
    // Interior tiers must share the multipliers; a tier sitting on the floor
    // only needs a gradient no larger than them.
    auto on_floor = [](double x) { return x <= 1.000001 * kFloor; };
    double eta = 0.0;
    double mu = 0.0;
    int active = 0;
    int interior = 0;
    for (Eigen::Index i = 0; i < k_; ++i) {
        if (p.frozen[static_cast<std::size_t>(i)])
            continue;
        ++active;
        if (on_floor(p.spectrum[i]) || (!assoc_fixed_ && on_floor(p.assoc[i])))
            continue;
        eta += g.assoc[i];
        mu += g.spectrum[i];
        ++interior;
    }
    if (active <= 1)
        return 0.0;
    if (interior == 0)
        return std::numeric_limits<double>::infinity();
    eta /= interior;
    mu /= interior;
    auto gap = [&](double grad, double mult, bool floor) {
        return floor ? std::max(0.0, grad - mult) : std::abs(grad - mult);
    };
    double worst = 0.0;
    for (Eigen::Index i = 0; i < k_; ++i) {
        if (p.frozen[static_cast<std::size_t>(i)])
            continue;
        double r = gap(g.spectrum[i], mu, on_floor(p.spectrum[i]));
        if (!assoc_fixed_)
            r += gap(g.assoc[i], eta, on_floor(p.assoc[i]));
        worst = std::max(worst, r);
    }
    return worst;
}

int Ascent::active_count(const Point& p) const
{
    return static_cast<int>(std::count(p.frozen.begin(), p.frozen.end(), false));
}

bool Ascent::at_floor(const Point& p, Eigen::Index i) const
{
    return p.spectrum[i] <= 1.000001 * kFloor || (!assoc_fixed_ && p.assoc[i] <= 1.000001 * kFloor);
}

// Sets eligible floor tiers to exactly 0 and renormalizes. Keeps at least one tier.
bool Ascent::freeze_floor(Point& p, const std::function<bool(int)>& eligible) const
{
    bool changed = false;
    for (Eigen::Index i = 0; i < k_; ++i) {
        const auto t = static_cast<std::size_t>(i);
        if (p.frozen[t] || !at_floor(p, i) || !eligible(static_cast<int>(i)) || active_count(p) <= 1)
            continue;
        p.frozen[t] = true;
        p.spectrum[i] = 0.0;
        if (!assoc_fixed_)
            p.assoc[i] = 0.0;
        changed = true;
    }
    if (changed) {
        if (!assoc_fixed_)
            p.assoc /= p.assoc.sum();
        p.spectrum /= p.spectrum.sum();
    }
    return changed;
}

// Projects x + t g onto the simplex of non-frozen coordinates and lifts every
// coordinate to the floor.
Eigen::VectorXd Ascent::step_on_simplex(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                        double t, const std::vector<bool>& frozen) const
{
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < k_; ++i)
        if (!frozen[static_cast<std::size_t>(i)])
            idx.push_back(i);

    Eigen::VectorXd sub(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        sub[static_cast<Eigen::Index>(j)] = x[idx[j]] + t * g[idx[j]];
    sub = project_to_simplex(sub).cwiseMax(kFloor);
    sub /= sub.sum();

    Eigen::VectorXd out = Eigen::VectorXd::Zero(k_);
    for (std::size_t j = 0; j < idx.size(); ++j)
        out[idx[j]] = sub[static_cast<Eigen::Index>(j)];
    return out;
}

bool Ascent::newton_polish(Point& p, Gradient& g, int& iterations) const
{
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < k_; ++i) {
        if (p.frozen[static_cast<std::size_t>(i)])
            continue;
        if (p.spectrum[i] <= 2.0 * kFloor || (!assoc_fixed_ && p.assoc[i] <= 2.0 * kFloor))
            return false;
        idx.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m <= 1)
        return true;

    // Unknowns: [dA (m, joint only), dw (m), eta (joint only), mu].
    const Eigen::Index na = assoc_fixed_ ? 0 : m;
    const Eigen::Index dim = na + m + (assoc_fixed_ ? 1 : 2);

    double res = residual(p, g);
    for (int round = 0; round < 50 && iterations < opts_.max_iterations; ++round) {
        if (res < opts_.tolerance)
            return true;

        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::Index i = idx[static_cast<std::size_t>(j)];
            const auto tier = static_cast<std::size_t>(i);
            const double a = p.assoc[i];
            const double w = p.spectrum[i];
            const double hw = 1e-6 * w;
            const auto wp = tier_term(config_, a, w + hw, tier, model_);
            const auto wm = tier_term(config_, a, w - hw, tier, model_);
            const double gww = (wp.grad_spectrum - wm.grad_spectrum) / (2.0 * hw);
            const Eigen::Index rw = na + j;
            kkt(rw, rw) = gww;
            kkt(rw, dim - 1) = -1.0;
            kkt(dim - 1, rw) = 1.0;
            rhs[rw] = -g.spectrum[i];
            if (!assoc_fixed_) {
                const double ha = 1e-6 * a;
                const auto ap = tier_term(config_, a + ha, w, tier, model_);
                const auto am = tier_term(config_, a - ha, w, tier, model_);
                const double gaa = (ap.grad_assoc - am.grad_assoc) / (2.0 * ha);
                const double gaw = 0.5 * ((wp.grad_assoc - wm.grad_assoc) / (2.0 * hw)
                                          + (ap.grad_spectrum - am.grad_spectrum) / (2.0 * ha));
                kkt(j, j) = gaa;
                kkt(j, rw) = gaw;
                kkt(rw, j) = gaw;
                kkt(j, dim - 2) = -1.0;
                kkt(dim - 2, j) = 1.0;
                rhs[j] = -g.assoc[i];
            }
        }
        if (!assoc_fixed_)
            rhs[dim - 2] = 1.0 - p.assoc.sum();
        rhs[dim - 1] = 1.0 - p.spectrum.sum();

        // rhs holds -grad, so the multipliers come out with the Lagrangian sign.
        const Eigen::VectorXd delta = kkt.fullPivLu().solve(rhs);
        if (!delta.allFinite())
            return false;

        bool accepted = false;
        for (double lambda = 1.0; lambda > 1e-6; lambda *= 0.5) {
            Point trial = p;
            bool feasible = true;
            for (Eigen::Index j = 0; j < m; ++j) {
                const Eigen::Index i = idx[static_cast<std::size_t>(j)];
                if (!assoc_fixed_)
                    trial.assoc[i] += lambda * delta[j];
                trial.spectrum[i] += lambda * delta[na + j];
                if (trial.spectrum[i] <= kFloor || trial.assoc[i] <= kFloor)
                    feasible = false;
            }
            if (!feasible)
                continue;
            if (!assoc_fixed_)
                trial.assoc /= trial.assoc.sum();
            trial.spectrum /= trial.spectrum.sum();
            const Gradient tg = evaluate(trial);
            const double tres = residual(trial, tg);
            if (tres < res && tg.objective >= g.objective - 1e-13) {
                p = std::move(trial);
                g = tg;
                res = tres;
                accepted = true;
                break;
            }
        }
        ++iterations;
        if (!accepted)
            return res < opts_.tolerance;
    }
    return res < opts_.tolerance;
}

LocalResult Ascent::run(const Eigen::VectorXd& assoc0, const Eigen::VectorXd& spectrum0) const
{
    LocalResult out;
    Point p{assoc0, spectrum0, std::vector<bool>(static_cast<std::size_t>(k_), false)};
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k_);
    if (!assoc_fixed_)
        p.assoc = step_on_simplex(p.assoc, zero, 0.0, p.frozen);
    p.spectrum = step_on_simplex(p.spectrum, zero, 0.0, p.frozen);

    Gradient g = evaluate(p);
    std::vector<int> pinned(static_cast<std::size_t>(k_), 0);
    double step = 1.0 / std::max(1.0, g.spectrum.cwiseAbs().maxCoeff());
    int it = 0;

    auto finish = [&](bool converged) {
        out.point = p;
        out.objective = g.objective;
        out.residual = residual(p, g);
        out.converged = converged || out.residual < opts_.tolerance;
        out.iterations = it;
        return out;
    };

    while (it < opts_.max_iterations) {
        if (active_count(p) <= 1 && !assoc_fixed_) {
            for (Eigen::Index i = 0; i < k_; ++i)
                if (!p.frozen[static_cast<std::size_t>(i)])
                    p.assoc[i] = p.spectrum[i] = 1.0;
            g = evaluate(p);
            return finish(true);
        }

        const double res = residual(p, g);
        if (res < opts_.tolerance)
            return finish(true);
        if (res < 1e-4) {
            Point trial = p;
            Gradient tg = g;
            if (newton_polish(trial, tg, it)) {
                p = std::move(trial);
                g = std::move(tg);
                return finish(true);
            }
        }

        // Armijo backtracking along the projected-gradient arc.
        bool accepted = false;
        Point next = p;
        Gradient ng;
        for (int h = 0; h < 60; ++h, step *= 0.5) {
            if (!assoc_fixed_)
                next.assoc = step_on_simplex(p.assoc, g.assoc, step, p.frozen);
            next.spectrum = step_on_simplex(p.spectrum, g.spectrum, step, p.frozen);
            const double predicted = g.spectrum.dot(next.spectrum - p.spectrum)
                                   + (assoc_fixed_ ? 0.0 : g.assoc.dot(next.assoc - p.assoc));
            ng = evaluate(next);
            if (ng.objective >= g.objective + kArmijo * predicted && ng.objective >= g.objective
                && predicted > 0.0) {
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted && freeze_floor(p, [](int) { return true; })) {
            g = evaluate(p);
            continue;
        }
        if (!accepted) {
            // No representable ascent left; try to finish with Newton.
            Point trial = p;
            Gradient tg = g;
            if (newton_polish(trial, tg, it)) {
                p = std::move(trial);
                g = std::move(tg);
                return finish(true);
            }
            return finish(false);
        }

        // Barzilai-Borwein estimate for the next trial step.
        const double ss = (next.spectrum - p.spectrum).squaredNorm()
                        + (assoc_fixed_ ? 0.0 : (next.assoc - p.assoc).squaredNorm());
        const double sy = (next.spectrum - p.spectrum).dot(ng.spectrum - g.spectrum)
                        + (assoc_fixed_ ? 0.0 : (next.assoc - p.assoc).dot(ng.assoc - g.assoc));
        step = sy < 0.0 ? ss / -sy : 4.0 * step;
        step = std::clamp(step, 1e-12, 1e6);

        p = std::move(next);
        g = std::move(ng);

        for (Eigen::Index i = 0; i < k_; ++i) {
            const auto t = static_cast<std::size_t>(i);
            pinned[t] = !p.frozen[t] && at_floor(p, i) ? pinned[t] + 1 : 0;
        }
        if (freeze_floor(p, [&](int i) { return pinned[static_cast<std::size_t>(i)] >= kFreezeAfter; }))
            g = evaluate(p);
    }
    return finish(false);
}

Eigen::VectorXd closed_form_shares(const NetworkConfig& config, bool* degenerate)
{
    const auto k = static_cast<Eigen::Index>(config.num_tiers());
    const double alpha = config.path_loss_exponent;
    Eigen::VectorXd rhos(k);
    std::vector<Eigen::Index> zero_threshold;
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& t = config.tiers[static_cast<std::size_t>(i)];
        double exponent = t.rate_threshold * config.user_density / (config.bandwidth * t.density);
        if (exponent > kExponentCap)
            rhos[i] = std::numeric_limits<double>::infinity();
        else
            rhos[i] = rho(std::expm1(exponent * std::numbers::ln2), alpha);
        if (rhos[i] == 0.0)
            zero_threshold.push_back(i);
    }

    Eigen::VectorXd shares = Eigen::VectorXd::Zero(k);
    if (degenerate)
        *degenerate = false;
    if (!zero_threshold.empty()) {
        for (auto i : zero_threshold)
            shares[i] = 1.0 / static_cast<double>(zero_threshold.size());
        if (degenerate)
            *degenerate = true;
        return shares;
    }

    // 1/rho scaled by the smallest rho so the weights stay in (0, 1].
    const double rho_min = rhos.minCoeff();
    if (std::isinf(rho_min)) {
        if (degenerate)
            *degenerate = true;
        return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    }
    for (Eigen::Index i = 0; i < k; ++i)
        shares[i] = rho_min / rhos[i];
    return shares / shares.sum();
}

SolveResult finalize(const NetworkConfig& config, LoadModel model, SolveMode mode,
                     AllocationPair alloc, bool converged, int iterations, bool assoc_fixed)
{
    SolveResult r;
    r.alloc = std::move(alloc);
    r.report = rate_coverage(config, r.alloc, model);
    r.converged = converged;
    r.iterations = iterations;
    r.mode = mode;
    r.load = model;
    if (assoc_fixed) {
        double mu = 0.0;
        int n = 0;
        for (Eigen::Index i = 0; i < r.alloc.spectrum.size(); ++i)
            if (r.alloc.spectrum[i] > 0.0) {
                mu += r.report.grad_spectrum[i];
                ++n;
            }
        mu /= std::max(n, 1);
        for (Eigen::Index i = 0; i < r.alloc.spectrum.size(); ++i)
            if (r.alloc.spectrum[i] > 0.0)
                r.kkt = std::max(r.kkt, std::abs(r.report.grad_spectrum[i] - mu));
    } else {
        r.kkt = kkt_residual(config, r.alloc, model).value;
    }
    return r;
}

SolveResult multi_start(const NetworkConfig& config, LoadModel model, const SolveOptions& opts,
                        SolveMode mode, const Eigen::VectorXd& fixed_assoc,
                        std::vector<Eigen::VectorXd> spectrum_starts,
                        std::vector<Eigen::VectorXd> assoc_starts)
{
    const bool assoc_fixed = fixed_assoc.size() > 0;
    const Ascent ascent(config, model, opts, assoc_fixed);
    const std::size_t n = spectrum_starts.size();

    auto solve_one = [&](std::size_t s) {
        const Eigen::VectorXd& a0 = assoc_fixed ? fixed_assoc : assoc_starts[s];
        return ascent.run(a0, spectrum_starts[s]);
    };

    std::vector<LocalResult> results(n);
    const auto threads = static_cast<std::size_t>(std::max(1, opts.threads));
    for (std::size_t begin = 0; begin < n; begin += threads) {
        const std::size_t end = std::min(n, begin + threads);
        if (threads == 1) {
            results[begin] = solve_one(begin);
            continue;
        }
        std::vector<std::future<LocalResult>> pending;
        for (std::size_t s = begin; s < end; ++s)
            pending.push_back(std::async(std::launch::async, solve_one, s));
        for (std::size_t s = begin; s < end; ++s)
            results[s] = pending[s - begin].get();
    }

    std::size_t best = 0;
    for (std::size_t s = 1; s < n; ++s)
        if (results[s].objective > results[best].objective)
            best = s;

    const auto& r = results[best];
    auto snap = [](Eigen::VectorXd v) {
        v = (v.array() <= 1.000001 * kFloor).select(0.0, v);
        return (v / v.sum()).eval();
    };
    AllocationPair alloc{assoc_fixed ? fixed_assoc : snap(r.point.assoc), snap(r.point.spectrum)};
    SolveResult out = finalize(config, model, mode, std::move(alloc), r.converged, r.iterations, assoc_fixed);
    for (const auto& local : results)
        out.start_objectives.push_back(local.objective);
    return out;
}

} // namespace

void SolveOptions::validate() const
{
    if (!(tolerance > 0.0))
        throw std::invalid_argument("solver.tolerance: must be > 0");
    if (max_iterations <= 0)
        throw std::invalid_argument("solver.max_iterations: must be > 0");
    if (restarts < 0)
        throw std::invalid_argument("solver.restarts: must be >= 0");
    if (!(grid_step > 0.0 && grid_step <= 1.0))
        throw std::invalid_argument("solver.grid_step: must lie in (0, 1]");
    if (threads <= 0)
        throw std::invalid_argument("threads: must be > 0");
}

std::string to_string(SolveMode mode)
{
    switch (mode) {
    case SolveMode::Joint: return "joint";
    case SolveMode::EqualFractions: return "equal_fractions";
    case SolveMode::MaxSirSpectrumOnly: return "maxsir";
    case SolveMode::BruteForce: return "brute_force";
    }
    return "unknown";
}

SolveResult optimize_equal_fractions(const NetworkConfig& config, LoadModel model)
{
    config.validate();
    if (model != LoadModel::MeanLoad)
        throw std::invalid_argument("equal-fractions closed form requires the mean-load model");
    bool degenerate = false;
    const Eigen::VectorXd shares = closed_form_shares(config, &degenerate);
    auto r = finalize(config, model, SolveMode::EqualFractions, {shares, shares}, true, 0, false);
    r.degenerate = degenerate;
    return r;
}

SolveResult optimize_joint(const NetworkConfig& config, LoadModel model, const SolveOptions& opts)
{
    config.validate();
    opts.validate();
    const auto k = static_cast<Eigen::Index>(config.num_tiers());
    if (k == 1) {
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
        return finalize(config, model, SolveMode::Joint, {one, one}, true, 0, false);
    }

    std::vector<Eigen::VectorXd> assoc_starts;
    std::vector<Eigen::VectorXd> spectrum_starts;
    const Eigen::VectorXd warm = closed_form_shares(config, nullptr);
    assoc_starts.push_back(warm);
    spectrum_starts.push_back(warm);
    std::mt19937_64 rng(opts.seed);
    for (int s = 0; s < opts.restarts; ++s) {
        assoc_starts.push_back(sample_simplex(k, rng));
        spectrum_starts.push_back(sample_simplex(k, rng));
    }
    return multi_start(config, model, opts, SolveMode::Joint, Eigen::VectorXd(),
                       std::move(spectrum_starts), std::move(assoc_starts));
}

SolveResult optimize_spectrum_maxsir(const NetworkConfig& config, LoadModel model,
                                     const SolveOptions& opts)
{
    config.validate();
    opts.validate();
    const double b0 = config.tiers.front().bias;
    for (const auto& t : config.tiers)
        if (std::abs(t.bias - b0) > 1e-12 * b0)
            throw std::invalid_argument("max-SIR spectrum optimization requires equal biases");

    const auto k = static_cast<Eigen::Index>(config.num_tiers());
    const Eigen::VectorXd assoc = association_probabilities(config);
    if (k == 1)
        return finalize(config, model, SolveMode::MaxSirSpectrumOnly,
                        {assoc, Eigen::VectorXd::Ones(1)}, true, 0, true);

    std::vector<Eigen::VectorXd> spectrum_starts{assoc,
                                                 Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k))};
    std::mt19937_64 rng(opts.seed);
    for (int s = 0; s < opts.restarts; ++s)
        spectrum_starts.push_back(sample_simplex(k, rng));
    return multi_start(config, model, opts, SolveMode::MaxSirSpectrumOnly, assoc,
                       std::move(spectrum_starts), {});
}

SolveResult brute_force(const NetworkConfig& config, LoadModel model, double grid_step)
{
    config.validate();
    const int k = static_cast<int>(config.num_tiers());
    if (k > 4)
        throw std::invalid_argument("brute_force: at most 4 tiers are supported");
    if (!(grid_step > 0.0 && grid_step <= 1.0))
        throw std::invalid_argument("grid_step: must lie in (0, 1]");
    const int n = static_cast<int>(std::lround(1.0 / grid_step));
    if (std::abs(n * grid_step - 1.0) > 1e-9)
        throw std::invalid_argument("grid_step: 1/grid_step must be an integer");
    if (simplex_lattice_size(k, n) > kMaxLatticePoints)
        throw std::invalid_argument("grid_step: lattice exceeds 1e7 points per simplex");

    const int side = n + 1;
    const auto cells = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    auto at = [side](int a, int w) { return static_cast<std::size_t>(a * side + w); };

    // f_k on the lattice, indexed [a * side + w].
    std::vector<std::vector<double>> table(static_cast<std::size_t>(k), std::vector<double>(cells));
    for (int t = 0; t < k; ++t)
        for (int a = 0; a <= n; ++a)
            for (int w = 0; w <= n; ++w)
                table[static_cast<std::size_t>(t)][at(a, w)] =
                    a == 0 ? 0.0
                           : tier_term(config, static_cast<double>(a) / n,
                                       static_cast<double>(w) / n, static_cast<std::size_t>(t), model)
                                 .value;

    // best[sa][sw]: best sum over the tiers processed so far using sa, sw grid units.
    std::vector<double> best = table[0];
    std::vector<std::vector<std::size_t>> choice; // per middle layer, argmax cell of that tier
    for (int t = 1; t < k - 1; ++t) {
        const auto& f = table[static_cast<std::size_t>(t)];
        std::vector<double> next(cells, -1.0);
        std::vector<std::size_t> pick(cells, 0);
        for (int sa = 0; sa <= n; ++sa)
            for (int sw = 0; sw <= n; ++sw) {
                double top = -1.0;
                std::size_t arg = 0;
                for (int a = 0; a <= sa; ++a) {
                    const double* prev = &best[at(sa - a, sw)];
                    const double* own = &f[at(a, 0)];
                    for (int w = 0; w <= sw; ++w) {
                        const double v = prev[-w] + own[w];
                        if (v > top) {
                            top = v;
                            arg = at(a, w);
                        }
                    }
                }
                next[at(sa, sw)] = top;
                pick[at(sa, sw)] = arg;
            }
        best = std::move(next);
        choice.push_back(std::move(pick));
    }

    Eigen::VectorXd assoc = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd spectrum = Eigen::VectorXd::Zero(k);
    if (k == 1) {
        assoc[0] = spectrum[0] = 1.0;
    } else {
        const auto& f = table[static_cast<std::size_t>(k - 1)];
        double top = -1.0;
        int best_a = 0;
        int best_w = 0;
        for (int a = 0; a <= n; ++a)
            for (int w = 0; w <= n; ++w) {
                const double v = best[at(n - a, n - w)] + f[at(a, w)];
                if (v > top) {
                    top = v;
                    best_a = a;
                    best_w = w;
                }
            }
        assoc[k - 1] = static_cast<double>(best_a) / n;
        spectrum[k - 1] = static_cast<double>(best_w) / n;
        int sa = n - best_a;
        int sw = n - best_w;
        for (int t = k - 2; t >= 1; --t) {
            const std::size_t cell = choice[static_cast<std::size_t>(t - 1)][at(sa, sw)];
            const int a = static_cast<int>(cell / static_cast<std::size_t>(side));
            const int w = static_cast<int>(cell % static_cast<std::size_t>(side));
            assoc[t] = static_cast<double>(a) / n;
            spectrum[t] = static_cast<double>(w) / n;
            sa -= a;
            sw -= w;
        }
        assoc[0] = static_cast<double>(sa) / n;
        spectrum[0] = static_cast<double>(sw) / n;
    }
    const int evaluations = k * side * side;
    return finalize(config, model, SolveMode::BruteForce, {assoc, spectrum}, true, evaluations,
                    false);
}

} // namespace hetnet
