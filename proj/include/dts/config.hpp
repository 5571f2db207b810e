#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dts/core.hpp"
#include "dts/ingest.hpp"
#include "dts/optimize/common.hpp"

namespace dts {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* seed_env_var = "DTS_SEED";

/// Everything a CLI run depends on. One seed drives dataset generation,
/// irrational-user injection and the optimizers.
struct RunConfig {
    std::uint64_t seed = 2024;
    SimulationConfig sim;
    int category = 2;
    FreeAttributes attributes{25469, std::nullopt, std::nullopt, 110, 6.94, 1.00};
    DatasetSpec dataset;
    IrrationalMix irrational;
    opt::OptimizerConfig optimizer;

    /// Copies `seed` into the per-module seeds.
    void propagate_seed()
    {
        sim.rng_seed = seed;
        dataset.seed = seed;
        optimizer.rng_seed = seed;
        dataset.count = sim.transaction_budget;
        dataset.arrival_rate_tps = sim.arrival_rate_tps;
        dataset.commission_ratio = sim.commission_ratio;
    }

    DtsStrategy strategy(const AttributeEnvelope& env = {}) const
    {
        return strategy_from_category(category_by_id(category), attributes, env);
    }
};

namespace config_detail {

// Shortest text that reads back to the same double.
inline std::string fmt(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <typename T>
T get(const boost::property_tree::ptree& pt, const std::string& key, T fallback)
{
    auto node = pt.get_optional<std::string>(key);
    if (!node)
        return fallback;
    std::istringstream is(*node);
    T v{};
    if constexpr (std::is_same_v<T, bool>) {
        std::string s = *node;
        if (s == "true" || s == "1" || s == "yes")
            return true;
        if (s == "false" || s == "0" || s == "no")
            return false;
        throw ConfigError("config: " + key + " expects a boolean, got '" + s + "'");
    } else {
        is >> v;
        if (is.fail() || !(is >> std::ws).eof())
            throw ConfigError("config: " + key + " has invalid value '" + *node + "'");
        return v;
    }
}

inline const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "run.seed",
        "simulation.leaf_capacity", "simulation.commission_ratio", "simulation.arrival_rate_tps",
        "simulation.transaction_budget", "simulation.verkle_branching_factor", "simulation.block_interval_ms",
        "simulation.flush_tail",
        "strategy.category", "strategy.A1", "strategy.A4", "strategy.A5", "strategy.A6", "strategy.A7",
        "strategy.A8",
        "dataset.amount_log_mean", "dataset.amount_log_sd", "dataset.fee_drift_sd", "dataset.fee_drift_corr",
        "irrational.rational", "irrational.overpaid", "irrational.underpaid", "irrational.over_lo",
        "irrational.over_hi", "irrational.under_lo", "irrational.under_hi",
        "optimizer.algorithm", "optimizer.n_pop", "optimizer.max_gen", "optimizer.n_eval", "optimizer.jobs",
        "optimizer.pso_k", "optimizer.pso_phi1", "optimizer.pso_phi2", "optimizer.de_f", "optimizer.de_cr",
        "optimizer.ga_tournament", "optimizer.ga_crossover", "optimizer.ga_mutation_rate",
        "optimizer.ga_sigma_start", "optimizer.ga_sigma_end", "optimizer.ga_elites", "optimizer.cmaes_sigma0",
        "optimizer.gbo_pr",
    };
    return keys;
}

} // namespace config_detail

/// Serialises a configuration as INI; parsing the result reproduces it.
inline std::string to_ini(const RunConfig& c)
{
    using config_detail::fmt;
    std::ostringstream os;
    os << "[run]\nseed = " << c.seed << "\n\n";
    os << "[simulation]\n"
       << "leaf_capacity = " << c.sim.leaf_capacity << '\n'
       << "commission_ratio = " << fmt(c.sim.commission_ratio) << '\n'
       << "arrival_rate_tps = " << fmt(c.sim.arrival_rate_tps) << '\n'
       << "transaction_budget = " << c.sim.transaction_budget << '\n'
       << "verkle_branching_factor = " << c.sim.verkle_branching_factor << '\n'
       << "block_interval_ms = " << c.sim.effective_block_interval_ms() << '\n'
       << "flush_tail = " << (c.sim.flush_tail ? "true" : "false") << "\n\n";
    os << "[strategy]\ncategory = " << c.category << '\n' << "A1 = " << c.attributes.mempool_size << '\n';
    if (c.attributes.small_fee_threshold)
        os << "A4 = " << fmt(*c.attributes.small_fee_threshold) << '\n';
    if (c.attributes.small_fee_count)
        os << "A5 = " << *c.attributes.small_fee_count << '\n';
    os << "A6 = " << c.attributes.max_trx_nodes << '\n'
       << "A7 = " << fmt(c.attributes.scale) << '\n'
       << "A8 = " << fmt(c.attributes.shape) << "\n\n";
    os << "[dataset]\n"
       << "amount_log_mean = " << fmt(c.dataset.amount_log_mean) << '\n'
       << "amount_log_sd = " << fmt(c.dataset.amount_log_sd) << '\n'
       << "fee_drift_sd = " << fmt(c.dataset.fee_drift_sd) << '\n'
       << "fee_drift_corr = " << fmt(c.dataset.fee_drift_corr) << "\n\n";
    os << "[irrational]\n"
       << "rational = " << fmt(c.irrational.rational_fraction) << '\n'
       << "overpaid = " << fmt(c.irrational.overpaid_fraction) << '\n'
       << "underpaid = " << fmt(c.irrational.underpaid_fraction) << '\n'
       << "over_lo = " << fmt(c.irrational.over_multiplier.lo) << '\n'
       << "over_hi = " << fmt(c.irrational.over_multiplier.hi) << '\n'
       << "under_lo = " << fmt(c.irrational.under_multiplier.lo) << '\n'
       << "under_hi = " << fmt(c.irrational.under_multiplier.hi) << "\n\n";
    const auto& o = c.optimizer;
    os << "[optimizer]\n"
       << "algorithm = " << opt::to_string(o.algorithm) << '\n'
       << "n_pop = " << o.n_pop << '\n'
       << "max_gen = " << o.max_gen << '\n'
       << "n_eval = " << o.n_eval << '\n'
       << "jobs = " << o.jobs << '\n'
       << "pso_k = " << fmt(o.pso_k) << '\n'
       << "pso_phi1 = " << fmt(o.pso_phi1) << '\n'
       << "pso_phi2 = " << fmt(o.pso_phi2) << '\n'
       << "de_f = " << fmt(o.de_f) << '\n'
       << "de_cr = " << fmt(o.de_cr) << '\n'
       << "ga_tournament = " << o.ga_tournament << '\n'
       << "ga_crossover = " << fmt(o.ga_crossover) << '\n'
       << "ga_mutation_rate = " << fmt(o.ga_mutation_rate) << '\n'
       << "ga_sigma_start = " << fmt(o.ga_sigma_start) << '\n'
       << "ga_sigma_end = " << fmt(o.ga_sigma_end) << '\n'
       << "ga_elites = " << o.ga_elites << '\n'
       << "cmaes_sigma0 = " << fmt(o.cmaes_sigma0) << '\n'
       << "gbo_pr = " << fmt(o.gbo_pr) << '\n';
    return os.str();
}

/// Overlays the keys present in an INI stream onto `base`. Unknown keys are errors.
inline RunConfig parse_ini(std::istream& in, RunConfig base = {})
{
    using config_detail::get;
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, _] : body)
            if (!config_detail::known_keys().contains(section + "." + key))
                throw ConfigError("config: unknown key " + section + "." + key);
    }

    RunConfig c = base;
    c.seed = get<std::uint64_t>(tree, "run.seed", c.seed);
    auto& s = c.sim;
    s.leaf_capacity = get(tree, "simulation.leaf_capacity", s.leaf_capacity);
    s.commission_ratio = get(tree, "simulation.commission_ratio", s.commission_ratio);
    s.arrival_rate_tps = get(tree, "simulation.arrival_rate_tps", s.arrival_rate_tps);
    s.transaction_budget = get(tree, "simulation.transaction_budget", s.transaction_budget);
    s.verkle_branching_factor = get(tree, "simulation.verkle_branching_factor", s.verkle_branching_factor);
    if (auto v = tree.get_optional<std::string>("simulation.block_interval_ms"))
        s.block_interval_ms = get<std::int64_t>(tree, "simulation.block_interval_ms", 0);
    s.flush_tail = get(tree, "simulation.flush_tail", s.flush_tail);

    c.category = get(tree, "strategy.category", c.category);
    auto& a = c.attributes;
    a.mempool_size = get(tree, "strategy.A1", a.mempool_size);
    if (tree.get_optional<std::string>("strategy.A4"))
        a.small_fee_threshold = get<double>(tree, "strategy.A4", 0.0);
    if (tree.get_optional<std::string>("strategy.A5"))
        a.small_fee_count = get<std::int64_t>(tree, "strategy.A5", 0);
    a.max_trx_nodes = get(tree, "strategy.A6", a.max_trx_nodes);
    a.scale = get(tree, "strategy.A7", a.scale);
    a.shape = get(tree, "strategy.A8", a.shape);

    auto& d = c.dataset;
    d.amount_log_mean = get(tree, "dataset.amount_log_mean", d.amount_log_mean);
    d.amount_log_sd = get(tree, "dataset.amount_log_sd", d.amount_log_sd);
    d.fee_drift_sd = get(tree, "dataset.fee_drift_sd", d.fee_drift_sd);
    d.fee_drift_corr = get(tree, "dataset.fee_drift_corr", d.fee_drift_corr);

    auto& m = c.irrational;
    m.rational_fraction = get(tree, "irrational.rational", m.rational_fraction);
    m.overpaid_fraction = get(tree, "irrational.overpaid", m.overpaid_fraction);
    m.underpaid_fraction = get(tree, "irrational.underpaid", m.underpaid_fraction);
    m.over_multiplier.lo = get(tree, "irrational.over_lo", m.over_multiplier.lo);
    m.over_multiplier.hi = get(tree, "irrational.over_hi", m.over_multiplier.hi);
    m.under_multiplier.lo = get(tree, "irrational.under_lo", m.under_multiplier.lo);
    m.under_multiplier.hi = get(tree, "irrational.under_hi", m.under_multiplier.hi);

    auto& o = c.optimizer;
    if (auto v = tree.get_optional<std::string>("optimizer.algorithm")) {
        try {
            o.algorithm = opt::parse_algorithm(*v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    o.n_pop = get(tree, "optimizer.n_pop", o.n_pop);
    o.max_gen = get(tree, "optimizer.max_gen", o.max_gen);
    o.n_eval = get(tree, "optimizer.n_eval", o.n_eval);
    o.jobs = get(tree, "optimizer.jobs", o.jobs);
    o.pso_k = get(tree, "optimizer.pso_k", o.pso_k);
    o.pso_phi1 = get(tree, "optimizer.pso_phi1", o.pso_phi1);
    o.pso_phi2 = get(tree, "optimizer.pso_phi2", o.pso_phi2);
    o.de_f = get(tree, "optimizer.de_f", o.de_f);
    o.de_cr = get(tree, "optimizer.de_cr", o.de_cr);
    o.ga_tournament = get(tree, "optimizer.ga_tournament", o.ga_tournament);
    o.ga_crossover = get(tree, "optimizer.ga_crossover", o.ga_crossover);
    o.ga_mutation_rate = get(tree, "optimizer.ga_mutation_rate", o.ga_mutation_rate);
    o.ga_sigma_start = get(tree, "optimizer.ga_sigma_start", o.ga_sigma_start);
    o.ga_sigma_end = get(tree, "optimizer.ga_sigma_end", o.ga_sigma_end);
    o.ga_elites = get(tree, "optimizer.ga_elites", o.ga_elites);
    o.cmaes_sigma0 = get(tree, "optimizer.cmaes_sigma0", o.cmaes_sigma0);
    o.gbo_pr = get(tree, "optimizer.gbo_pr", o.gbo_pr);
    return c;
}

inline RunConfig load_ini(const std::string& path, RunConfig base = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    return parse_ini(in, std::move(base));
}

/// Defaults with the seed environment override applied.
inline RunConfig default_config()
{
    RunConfig c;
    if (const char* env = std::getenv(seed_env_var); env && *env) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw ConfigError(std::string("config: ") + seed_env_var + " is not an unsigned integer");
        c.seed = v;
    }
    return c;
}

} // namespace dts
