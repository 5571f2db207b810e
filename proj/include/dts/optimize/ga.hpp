#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dts/optimize/common.hpp"

namespace dts::opt {

/// Generational real-coded GA: tournament selection, uniform crossover,
/// per-gene Gaussian mutation with a geometrically shrinking step, elitism.
inline OptimizationRun run_ga(const SearchSpace& space, const Objective& f, const OptimizerConfig& cfg)
{
    check_config(cfg);
    std::mt19937_64 rng(cfg.rng_seed);
    Evaluator ev(space, f, cfg.n_eval, cfg.jobs);
    const std::size_t d = space.size();
    const double pm = cfg.ga_mutation_rate > 0.0 ? cfg.ga_mutation_rate : 1.0 / double(d);
    const int tournament = std::max(1, cfg.ga_tournament);
    const std::size_t elites = std::size_t(std::clamp(cfg.ga_elites, 0, cfg.n_pop));

    auto pop = uniform_population(space, cfg.n_pop, rng);
    auto fit = ev.evaluate(pop);

    auto select = [&]() -> const std::vector<double>& {
        std::size_t best = pick(pop.size(), rng);
        for (int t = 1; t < tournament; ++t) {
            const std::size_t c = pick(pop.size(), rng);
            if (fit[c] < fit[best])
                best = c;
        }
        return pop[best];
    };

    const int gens = generation_count(cfg);
    for (int gen = 0; gen < gens && !ev.exhausted(); ++gen) {
        const double progress = gens > 1 ? double(gen) / double(gens - 1) : 1.0;
        const double sigma_frac = cfg.ga_sigma_start * std::pow(cfg.ga_sigma_end / cfg.ga_sigma_start, progress);

        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

        std::vector<std::vector<double>> next;
        std::vector<double> next_fit;
        for (std::size_t e = 0; e < elites; ++e) {
            next.push_back(pop[order[e]]);
            next_fit.push_back(fit[order[e]]);
        }

        std::vector<std::vector<double>> children;
        while (next.size() + children.size() < pop.size()) {
            auto a = select();
            auto b = select();
            if (unit(rng) < cfg.ga_crossover)
                for (std::size_t j = 0; j < d; ++j)
                    if (unit(rng) < 0.5)
                        std::swap(a[j], b[j]);
            for (auto* child : {&a, &b}) {
                for (std::size_t j = 0; j < d; ++j)
                    if (unit(rng) < pm)
                        (*child)[j] += sigma_frac * space.dims[j].width() * gauss(rng);
                space.clamp(*child);
            }
            children.push_back(std::move(a));
            if (next.size() + children.size() < pop.size())
                children.push_back(std::move(b));
        }

        const auto fc = ev.evaluate(children);
        for (std::size_t i = 0; i < children.size(); ++i) {
            next.push_back(std::move(children[i]));
            next_fit.push_back(fc[i]);
        }
        pop = std::move(next);
        fit = std::move(next_fit);
    }
    return ev.finish(Algorithm::ga);
}

} // namespace dts::opt
