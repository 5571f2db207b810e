#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dts/core.hpp"
#include "dts/metrics.hpp"
#include "dts/optimize/cmaes.hpp"
#include "dts/optimize/common.hpp"
#include "dts/optimize/de.hpp"
#include "dts/optimize/ga.hpp"
#include "dts/optimize/gbo.hpp"
#include "dts/optimize/pso.hpp"
#include "dts/simulator.hpp"

namespace dts::opt {

inline constexpr double penalty = std::numeric_limits<double>::infinity();

/// Volatility of the block series produced by a candidate strategy; invalid
/// candidates and runs too short to define a volatility score `penalty`.
inline double evaluate(std::span<const double> candidate, StrategyCategory category,
                       std::span<const Transaction> dataset, const SimulationConfig& cfg,
                       const AttributeEnvelope& env = {})
{
    try {
        const auto space = SearchSpace::for_category(category, env);
        const auto strategy = strategy_from_category(category, to_attributes(space, candidate), env);
        if (!validate_strategy(strategy, cfg).empty())
            return penalty;
        SimulationConfig c = cfg;
        c.build_trees = false; // roots do not affect incentives
        const double v = block_volatility(run(dataset, strategy, c).blocks);
        return std::isnan(v) ? penalty : v;
    } catch (const std::invalid_argument&) {
        return penalty;
    } catch (const std::domain_error&) {
        return penalty;
    }
}

inline OptimizationRun run_optimizer(Algorithm algo, const SearchSpace& space, const Objective& objective,
                                     OptimizerConfig cfg)
{
    if (space.empty())
        throw std::invalid_argument("optimizer: empty search space");
    cfg.algorithm = algo;
    switch (algo) {
    case Algorithm::pso:
        return run_pso(space, objective, cfg);
    case Algorithm::de:
        return run_de(space, objective, cfg);
    case Algorithm::ga:
        return run_ga(space, objective, cfg);
    case Algorithm::cmaes:
        return run_cmaes(space, objective, cfg);
    case Algorithm::gbo:
        return run_gbo(space, objective, cfg);
    }
    throw std::invalid_argument("optimizer: unknown algorithm");
}

/// Optimises the free attributes of one strategy category on a fixed dataset.
inline OptimizationRun optimize_category(Algorithm algo, StrategyCategory category,
                                         std::span<const Transaction> dataset, const SimulationConfig& sim,
                                         const OptimizerConfig& cfg, const AttributeEnvelope& env = {})
{
    if (dataset.empty())
        throw std::invalid_argument("optimizer: empty dataset");
    const auto space = SearchSpace::for_category(category, env);
    Objective f = [&](std::span<const double> x) { return evaluate(x, category, dataset, sim, env); };
    return run_optimizer(algo, space, f, cfg);
}

// Category order within each algorithm's block of four experiments.
inline constexpr std::array<int, 4> grid_category_order{2, 1, 4, 3};

struct GridRow {
    Algorithm algorithm = Algorithm::pso;
    int experiment = 0;
    StrategyCategory category;
    FreeAttributes attributes;
    double volatility = penalty;
    std::int64_t evaluations = 0;
    OptimizationRun run;
};

/// Five algorithms times four categories, numbered 1..20.
inline std::vector<GridRow> experiment_grid(std::span<const Transaction> dataset, const SimulationConfig& sim,
                                            const OptimizerConfig& cfg, const AttributeEnvelope& env = {})
{
    if (dataset.empty())
        throw std::invalid_argument("experiment grid: empty dataset");
    std::vector<GridRow> rows;
    int experiment = 0;
    for (auto algo : all_algorithms) {
        for (int cat_id : grid_category_order) {
            const auto cat = category_by_id(cat_id);
            GridRow r;
            r.algorithm = algo;
            r.experiment = ++experiment;
            r.category = cat;
            r.run = optimize_category(algo, cat, dataset, sim, cfg, env);
            r.attributes = to_attributes(SearchSpace::for_category(cat, env), r.run.best.x);
            r.volatility = r.run.best.value;
            r.evaluations = r.run.evaluations;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

inline void write_grid_csv(std::ostream& os, std::span<const GridRow> rows)
{
    os << "algorithm,experiment,A1,A2,A3,A4,A5,A6,A7,A8,volatility,evaluations\n";
    char buf[256];
    for (const auto& r : rows) {
        const auto& a = r.attributes;
        std::string a4 = "-", a5 = "-";
        if (a.small_fee_threshold) {
            std::snprintf(buf, sizeof buf, "%.6g", *a.small_fee_threshold);
            a4 = buf;
        }
        if (a.small_fee_count)
            a5 = std::to_string(*a.small_fee_count);
        std::snprintf(buf, sizeof buf, "%s,%d,%lld,%s,%s,%s,%s,%lld,%.6g,%.6g,%.10g,%lld",
                      std::string(display_name(r.algorithm)).c_str(), r.experiment, (long long)a.mempool_size,
                      std::string(to_string(r.category.priority)).c_str(),
                      r.category.designated_space ? "True" : "False", a4.c_str(), a5.c_str(),
                      (long long)a.max_trx_nodes, a.scale, a.shape, r.volatility, (long long)r.evaluations);
        os << buf << '\n';
    }
}

/// Best-so-far per generation: generation, best volatility.
inline void write_trace_csv(std::ostream& os, const OptimizationRun& run)
{
    os << "generation,best\n";
    char buf[64];
    for (std::size_t g = 0; g < run.trace.size(); ++g) {
        std::snprintf(buf, sizeof buf, "%.17g", run.trace[g]);
        os << g << ',' << buf << '\n';
    }
}

} // namespace dts::opt
