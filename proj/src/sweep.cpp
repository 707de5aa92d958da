#include "hetnet/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace hetnet {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

SweepRow failed_row(SweepMode mode, std::size_t k)
{
    SweepRow row;
    row.mode = mode;
    row.objective = kNaN;
    row.assoc = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), kNaN);
    row.spectrum = row.assoc;
    row.biases = row.assoc;
    return row;
}

void check_row(const SweepRow& row, std::size_t k, const std::string& where)
{
    if (std::isnan(row.objective))
        return; // recorded solver failure
    if (!(row.objective >= 0.0 && row.objective <= 1.0 + 1e-9))
        throw ConfigError(where + ".objective", "must lie in [0,1]");
    try {
        AllocationPair{row.assoc, row.spectrum}.validate(k, 1e-8);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    }
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where)
{
    if (s == "nan")
        return kNaN;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where, "expected a number, got \"" + s + "\"");
    }
}

json vec_json(const Eigen::VectorXd& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(std::isnan(v[i]) ? json(nullptr) : json(v[i]));
    return a;
}

Eigen::VectorXd vec_from_json(const json& a, std::size_t k, const std::string& where)
{
    if (!a.is_array() || a.size() != k)
        throw ConfigError(where, "expected an array of " + std::to_string(k) + " numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
        v[static_cast<Eigen::Index>(i)] = a[i].is_null() ? kNaN : a[i].get<double>();
    return v;
}

} // namespace

NetworkConfig apply_threshold(NetworkConfig config, const SweepSpec& spec, double value)
{
    if (spec.tier) {
        config.tiers.at(*spec.tier).rate_threshold = value;
    } else {
        for (auto& t : config.tiers)
            t.rate_threshold = value;
    }
    return config;
}

SweepRow solve_row(const NetworkConfig& config, SweepMode mode, const SolveOptions& opts,
                   const SimConfig* sim)
{
    SolveResult r;
    LoadModel load = LoadModel::MeanLoad;
    try {
        switch (mode) {
        case SweepMode::Joint: r = optimize_joint(config, LoadModel::MeanLoad, opts); break;
        case SweepMode::EqualFractions: r = optimize_equal_fractions(config); break;
        case SweepMode::MaxSirSpectrumOnly: {
            const auto unbiased = with_biases(
                config, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(config.num_tiers())));
            r = optimize_spectrum_maxsir(unbiased, LoadModel::MeanLoad, opts);
            break;
        }
        case SweepMode::BruteForce: r = brute_force(config, LoadModel::MeanLoad, opts.grid_step); break;
        case SweepMode::JointHigherLoad:
            load = LoadModel::HigherLoad;
            r = optimize_joint(config, LoadModel::HigherLoad, opts);
            break;
        }
    } catch (const std::exception&) {
        return failed_row(mode, config.num_tiers());
    }

    SweepRow row;
    row.mode = mode;
    row.objective = r.report.objective;
    row.assoc = r.alloc.assoc;
    row.spectrum = r.alloc.spectrum;
    row.biases = implied_biases(config, r.alloc.assoc);
    row.converged = r.converged;
    if (sim) {
        SimConfig s = *sim;
        s.load_model = load;
        const auto mc = simulate_coverage(config, r.alloc, s);
        row.mc_estimate = mc.coverage_estimate;
        row.mc_stderr = mc.std_error;
    }
    return row;
}

SweepTable run_sweep(const NetworkConfig& config, const SweepSpec& spec, const SolveOptions& opts,
                     const SimConfig* sim, int threads)
{
    config.validate();
    opts.validate();
    spec.validate(config.num_tiers());

    SweepTable table;
    table.num_tiers = config.num_tiers();
    table.provenance = {config_hash(config), opts.seed, opts.tolerance};

    const std::size_t nmodes = spec.modes.size();
    const std::size_t total = spec.values.size() * nmodes;
    table.rows.resize(total);

    // Workers already run in parallel; keep each solve and simulation serial.
    SolveOptions inner = opts;
    inner.threads = 1;
    std::optional<SimConfig> inner_sim;
    if (sim) {
        inner_sim = *sim;
        inner_sim->threads = 1;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            const double value = spec.values[i / nmodes];
            const auto net = apply_threshold(config, spec, value);
            SweepRow row = solve_row(net, spec.modes[i % nmodes], inner,
                                     inner_sim ? &*inner_sim : nullptr);
            row.threshold = value;
            table.rows[i] = std::move(row);
        }
    };

    const auto n = static_cast<std::size_t>(std::max(1, threads));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t)
            pool.emplace_back(worker);
    }
    return table;
}

std::string to_csv(const SweepTable& table)
{
    const std::size_t k = table.num_tiers;
    std::ostringstream out;
    out << "threshold,mode,objective";
    for (const char* prefix : {"A_", "w_", "B_"})
        for (std::size_t i = 1; i <= k; ++i)
            out << ',' << prefix << i;
    out << ",converged,mc_estimate,mc_stderr,config_hash,seed,tolerance\n";

    for (const auto& row : table.rows) {
        out << (row.threshold ? fmt(*row.threshold) : "") << ',' << to_string(row.mode) << ','
            << fmt(row.objective);
        for (const Eigen::VectorXd* v : {&row.assoc, &row.spectrum, &row.biases})
            for (Eigen::Index i = 0; i < v->size(); ++i)
                out << ',' << fmt((*v)[i]);
        out << ',' << (row.converged ? "true" : "false") << ','
            << (row.mc_estimate ? fmt(*row.mc_estimate) : "") << ','
            << (row.mc_stderr ? fmt(*row.mc_stderr) : "") << ',' << table.provenance.config_hash
            << ',' << table.provenance.seed << ',' << fmt(table.provenance.tolerance) << '\n';
    }
    return out.str();
}

json to_json(const SweepTable& table)
{
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back({
            {"threshold", row.threshold ? json(*row.threshold) : json(nullptr)},
            {"mode", to_string(row.mode)},
            {"objective", std::isnan(row.objective) ? json(nullptr) : json(row.objective)},
            {"assoc", vec_json(row.assoc)},
            {"spectrum", vec_json(row.spectrum)},
            {"biases", vec_json(row.biases)},
            {"converged", row.converged},
            {"mc_estimate", row.mc_estimate ? json(*row.mc_estimate) : json(nullptr)},
            {"mc_stderr", row.mc_stderr ? json(*row.mc_stderr) : json(nullptr)},
            {"config_hash", table.provenance.config_hash},
            {"seed", table.provenance.seed},
            {"tolerance", table.provenance.tolerance},
        });
    }
    return rows;
}

SweepTable parse_results_json(const json& doc)
{
    if (!doc.is_array())
        throw ConfigError("", "expected an array of rows");
    SweepTable table;
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const std::string where = "[" + std::to_string(r) + "]";
        const json& j = doc[r];
        try {
            if (r == 0)
                table.num_tiers = j.at("assoc").size();
            SweepRow row;
            if (!j.at("threshold").is_null())
                row.threshold = j.at("threshold").get<double>();
            row.mode = parse_sweep_mode(j.at("mode").get<std::string>());
            row.objective = j.at("objective").is_null() ? kNaN : j.at("objective").get<double>();
            row.assoc = vec_from_json(j.at("assoc"), table.num_tiers, where + ".assoc");
            row.spectrum = vec_from_json(j.at("spectrum"), table.num_tiers, where + ".spectrum");
            row.biases = vec_from_json(j.at("biases"), table.num_tiers, where + ".biases");
            row.converged = j.at("converged").get<bool>();
            if (!j.at("mc_estimate").is_null())
                row.mc_estimate = j.at("mc_estimate").get<double>();
            if (!j.at("mc_stderr").is_null())
                row.mc_stderr = j.at("mc_stderr").get<double>();
            table.provenance = {j.at("config_hash").get<std::string>(), j.at("seed").get<std::uint64_t>(),
                                j.at("tolerance").get<double>()};
            check_row(row, table.num_tiers, where);
            table.rows.push_back(std::move(row));
        } catch (const json::exception& e) {
            throw ConfigError(where, e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where, e.what());
        }
    }
    return table;
}

SweepTable parse_results_csv(const std::string& csv)
{
    std::istringstream in(csv);
    std::string header;
    if (!std::getline(in, header))
        throw ConfigError("", "empty results file");
    const auto cols = split(header, ',');
    // 3 leading, 3K allocation, 6 trailing columns.
    if (cols.size() < 12 || (cols.size() - 9) % 3 != 0 || cols[0] != "threshold")
        throw ConfigError("header", "unexpected column layout");
    SweepTable table;
    table.num_tiers = (cols.size() - 9) / 3;
    const std::size_t k = table.num_tiers;
    const auto ik = static_cast<Eigen::Index>(k);

    std::string line;
    for (std::size_t r = 1; std::getline(in, line); ++r) {
        if (line.empty())
            continue;
        const std::string where = "row " + std::to_string(r);
        const auto cells = split(line, ',');
        if (cells.size() != cols.size())
            throw ConfigError(where, "expected " + std::to_string(cols.size()) + " columns");
        SweepRow row;
        if (!cells[0].empty())
            row.threshold = parse_double(cells[0], where + ".threshold");
        try {
            row.mode = parse_sweep_mode(cells[1]);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ".mode", e.what());
        }
        row.objective = parse_double(cells[2], where + ".objective");
        row.assoc.resize(ik);
        row.spectrum.resize(ik);
        row.biases.resize(ik);
        for (std::size_t i = 0; i < k; ++i) {
            const auto e = static_cast<Eigen::Index>(i);
            row.assoc[e] = parse_double(cells[3 + i], where + "." + cols[3 + i]);
            row.spectrum[e] = parse_double(cells[3 + k + i], where + "." + cols[3 + k + i]);
            row.biases[e] = parse_double(cells[3 + 2 * k + i], where + "." + cols[3 + 2 * k + i]);
        }
        const std::size_t c = 3 + 3 * k;
        if (cells[c] != "true" && cells[c] != "false")
            throw ConfigError(where + ".converged", "expected true or false");
        row.converged = cells[c] == "true";
        if (!cells[c + 1].empty())
            row.mc_estimate = parse_double(cells[c + 1], where + ".mc_estimate");
        if (!cells[c + 2].empty())
            row.mc_stderr = parse_double(cells[c + 2], where + ".mc_stderr");
        table.provenance.config_hash = cells[c + 3];
        table.provenance.seed = std::stoull(cells[c + 4]);
        table.provenance.tolerance = parse_double(cells[c + 5], where + ".tolerance");
        check_row(row, k, where);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace hetnet
