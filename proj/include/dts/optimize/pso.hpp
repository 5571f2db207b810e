#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dts/optimize/common.hpp"

namespace dts::opt {

struct PsoCoefficients {
    double w = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Clerc-Kennedy constriction: chi = 2k / |2 - phi - sqrt(phi^2 - 4 phi)|,
/// w = chi, c1 = phi1 chi, c2 = phi2 chi, with phi = phi1 + phi2 >= 4.
inline PsoCoefficients constriction_params(double k, double phi1, double phi2)
{
    const double phi = phi1 + phi2;
    if (!(phi >= 4.0))
        throw std::invalid_argument("constriction: phi1 + phi2 must be at least 4");
    if (!(k >= 0.0 && k <= 1.0))
        throw std::invalid_argument("constriction: k must lie in [0, 1]");
    const double chi = 2.0 * k / std::abs(2.0 - phi - std::sqrt(phi * phi - 4.0 * phi));
    return {chi, phi1 * chi, phi2 * chi};
}

/// Global-best PSO with constriction; velocities limited to the box width.
inline OptimizationRun run_pso(const SearchSpace& space, const Objective& f, const OptimizerConfig& cfg)
{
    check_config(cfg);
    const auto [w, c1, c2] = constriction_params(cfg.pso_k, cfg.pso_phi1, cfg.pso_phi2);
    std::mt19937_64 rng(cfg.rng_seed);
    Evaluator ev(space, f, cfg.n_eval, cfg.jobs);
    const std::size_t d = space.size();

    auto x = uniform_population(space, cfg.n_pop, rng);
    std::vector<std::vector<double>> v(x.size(), std::vector<double>(d, 0.0));
    for (auto& vi : v)
        for (std::size_t j = 0; j < d; ++j)
            vi[j] = (2.0 * unit(rng) - 1.0) * 0.1 * space.dims[j].width();

    auto fx = ev.evaluate(x);
    auto pbest = x;
    auto pbest_f = fx;
    auto gbest_index = [&] {
        std::size_t g = 0;
        for (std::size_t i = 1; i < pbest.size(); ++i)
            if (pbest_f[i] < pbest_f[g])
                g = i;
        return g;
    };

    const int gens = generation_count(cfg);
    for (int gen = 0; gen < gens && !ev.exhausted(); ++gen) {
        const auto g = pbest[gbest_index()];
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double vmax = space.dims[j].width();
                double vij = w * v[i][j] + c1 * unit(rng) * (pbest[i][j] - x[i][j]) + c2 * unit(rng) * (g[j] - x[i][j]);
                v[i][j] = std::clamp(vij, -vmax, vmax);
                x[i][j] += v[i][j];
            }
            space.clamp(x[i]);
        }
        fx = ev.evaluate(x);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (fx[i] < pbest_f[i]) {
                pbest[i] = x[i];
                pbest_f[i] = fx[i];
            }
    }
    return ev.finish(Algorithm::pso);
}

} // namespace dts::opt
