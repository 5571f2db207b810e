#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dts/optimize/common.hpp"

namespace dts::opt {

namespace gbo_detail {

using Vec = std::vector<double>;

// Gradient search rule. `from_self` selects the X - GSR + DM anchor (true)
// or the best - GSR + DM anchor (false) used to build the probe points.
inline Vec gradient_search_rule(double ro1, const Vec& best, const Vec& worst, const Vec& x, const Vec& xr1,
                                const Vec& dm, double eps, const Vec& xm, bool from_self, std::mt19937_64& rng)
{
    const std::size_t d = x.size();
    Vec del_x(d), gsr(d), xs(d);
    const double r_delta = unit(rng);
    for (std::size_t j = 0; j < d; ++j) {
        const double delta = 2.0 * r_delta * std::abs(xm[j] - x[j]);
        const double step = ((best[j] - xr1[j]) + delta) / 2.0;
        del_x[j] = unit(rng) * std::abs(step);
    }
    const double n1 = gauss(rng);
    for (std::size_t j = 0; j < d; ++j) {
        gsr[j] = n1 * ro1 * (2.0 * del_x[j] * x[j]) / (worst[j] - best[j] + eps);
        xs[j] = (from_self ? x[j] : best[j]) - gsr[j] + dm[j];
    }
    const double a = unit(rng), b = unit(rng), c = unit(rng), e = unit(rng);
    const double n2 = gauss(rng);
    for (std::size_t j = 0; j < d; ++j) {
        const double yp = a * (0.5 * (xs[j] + x[j]) + b * del_x[j]);
        const double yq = c * (0.5 * (xs[j] + x[j]) - e * del_x[j]);
        gsr[j] = n2 * ro1 * (2.0 * del_x[j] * (yp - yq)) / (yp + yq + eps);
    }
    return gsr;
}

} // namespace gbo_detail

/// Gradient-based optimizer: gradient search rule plus local escaping
/// operator. New positions for the whole population are generated from
/// the generation's snapshot and evaluated together, then accepted greedily.
inline OptimizationRun run_gbo(const SearchSpace& space, const Objective& f, const OptimizerConfig& cfg)
{
    using gbo_detail::Vec;
    check_config(cfg);
    std::mt19937_64 rng(cfg.rng_seed);
    Evaluator ev(space, f, cfg.n_eval, cfg.jobs);
    const std::size_t d = space.size();
    const std::size_t np = std::size_t(cfg.n_pop);
    if (np < 5)
        throw std::invalid_argument("gbo: population must hold at least 5 members");

    auto x = uniform_population(space, cfg.n_pop, rng);
    auto cost = ev.evaluate(x);

    auto argbest = [&] { return std::size_t(std::min_element(cost.begin(), cost.end()) - cost.begin()); };
    auto argworst = [&] { return std::size_t(std::max_element(cost.begin(), cost.end()) - cost.begin()); };

    const int max_it = generation_count(cfg);
    constexpr double pi = std::numbers::pi;
    for (int it = 1; it <= max_it && !ev.exhausted(); ++it) {
        const double t = double(it) / double(max_it);
        const double beta = 0.2 + (1.2 - 0.2) * std::pow(1.0 - t * t * t, 2.0);
        const double alpha = std::abs(beta * std::sin(3.0 * pi / 2.0 + std::sin(3.0 * pi / 2.0 * beta)));
        const Vec best = x[argbest()];
        const Vec worst = x[argworst()];

        std::vector<Vec> trial(np);
        for (std::size_t i = 0; i < np; ++i) {
            const auto r = distinct_indices(np, 4, i, rng);
            const Vec &xr1 = x[r[0]], &xr2 = x[r[1]], &xr3 = x[r[2]], &xr4 = x[r[3]];
            Vec xm(d);
            for (std::size_t j = 0; j < d; ++j)
                xm[j] = (xr1[j] + xr2[j] + xr3[j] + xr4[j]) / 4.0;

            const double ro = alpha * (2.0 * unit(rng) - 1.0);
            const double ro1 = alpha * (2.0 * unit(rng) - 1.0);
            const double eps = 5e-3 * unit(rng);

            Vec dm(d);
            double rr = unit(rng);
            for (std::size_t j = 0; j < d; ++j)
                dm[j] = rr * ro * (best[j] - xr1[j]);
            Vec gsr = gbo_detail::gradient_search_rule(ro1, best, worst, x[i], xr1, dm, eps, xm, true, rng);
            rr = unit(rng);
            Vec x1(d);
            for (std::size_t j = 0; j < d; ++j)
                x1[j] = x[i][j] - gsr[j] + rr * ro * (best[j] - xr1[j]);

            rr = unit(rng);
            for (std::size_t j = 0; j < d; ++j)
                dm[j] = rr * ro * (xr1[j] - xr2[j]);
            gsr = gbo_detail::gradient_search_rule(ro1, best, worst, x[i], xr1, dm, eps, xm, false, rng);
            rr = unit(rng);
            Vec x2(d);
            for (std::size_t j = 0; j < d; ++j)
                x2[j] = best[j] - gsr[j] + rr * ro * (xr1[j] - xr2[j]);

            Vec xn(d);
            for (std::size_t j = 0; j < d; ++j) {
                const double roj = alpha * (2.0 * unit(rng) - 1.0);
                const double x3 = x[i][j] - roj * (x2[j] - x1[j]);
                const double ra = unit(rng), rb = unit(rng);
                xn[j] = ra * (rb * x1[j] + (1.0 - rb) * x2[j]) + (1.0 - ra) * x3;
            }

            // local escaping operator
            if (unit(rng) < cfg.gbo_pr) {
                const std::size_t k = pick(np, rng);
                const double f1 = 2.0 * unit(rng) - 1.0;
                const double f2 = 2.0 * unit(rng) - 1.0;
                const double rol = alpha * (2.0 * unit(rng) - 1.0);
                const Vec xk = uniform_point(space, rng);
                const bool l1 = unit(rng) < 0.5;
                const double u1 = l1 ? 2.0 * unit(rng) : 1.0;
                const double u2 = l1 ? unit(rng) : 1.0;
                const double u3 = l1 ? unit(rng) : 1.0;
                const bool l2 = unit(rng) < 0.5;
                const Vec& xp = l2 ? xk : x[k];
                for (std::size_t j = 0; j < d; ++j) {
                    const double jump = f1 * (u1 * best[j] - u2 * xp[j]) +
                                        f2 * rol * (u3 * (x2[j] - x1[j]) + u2 * (xr1[j] - xr2[j])) / 2.0;
                    xn[j] = (u1 < 0.5 ? xn[j] : best[j]) + jump;
                }
            }
            space.clamp(xn);
            trial[i] = std::move(xn);
        }

        const auto ft = ev.evaluate(trial);
        for (std::size_t i = 0; i < np; ++i)
            if (ft[i] < cost[i]) {
                x[i] = std::move(trial[i]);
                cost[i] = ft[i];
            }
    }
    return ev.finish(Algorithm::gbo);
}

} // namespace dts::opt
