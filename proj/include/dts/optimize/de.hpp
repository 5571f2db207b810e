#pragma once

#include <random>
#include <vector>

#include "dts/optimize/common.hpp"

namespace dts::opt {

/// DE/rand/1/bin with greedy one-to-one replacement.
inline OptimizationRun run_de(const SearchSpace& space, const Objective& f, const OptimizerConfig& cfg)
{
    check_config(cfg);
    std::mt19937_64 rng(cfg.rng_seed);
    Evaluator ev(space, f, cfg.n_eval, cfg.jobs);
    const std::size_t d = space.size();

    auto x = uniform_population(space, cfg.n_pop, rng);
    auto fx = ev.evaluate(x);

    const int gens = generation_count(cfg);
    for (int gen = 0; gen < gens && !ev.exhausted(); ++gen) {
        std::vector<std::vector<double>> trial(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto r = distinct_indices(x.size(), 3, i, rng);
            const std::size_t jrand = pick(d, rng);
            trial[i] = x[i];
            for (std::size_t j = 0; j < d; ++j)
                if (unit(rng) < cfg.de_cr || j == jrand)
                    trial[i][j] = x[r[0]][j] + cfg.de_f * (x[r[1]][j] - x[r[2]][j]);
            space.clamp(trial[i]);
        }
        const auto ft = ev.evaluate(trial);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (ft[i] <= fx[i]) {
                x[i] = std::move(trial[i]);
                fx[i] = ft[i];
            }
    }
    return ev.finish(Algorithm::de);
}

} // namespace dts::opt
