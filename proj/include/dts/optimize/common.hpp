#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dts/core.hpp"

namespace dts::opt {

enum class Algorithm { pso, de, ga, cmaes, gbo };

inline constexpr std::array<Algorithm, 5> all_algorithms{Algorithm::pso, Algorithm::de, Algorithm::ga,
                                                         Algorithm::cmaes, Algorithm::gbo};

inline std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::pso:
        return "pso";
    case Algorithm::de:
        return "de";
    case Algorithm::ga:
        return "ga";
    case Algorithm::cmaes:
        return "cmaes";
    case Algorithm::gbo:
        return "gbo";
    }
    return "?";
}

inline std::string_view display_name(Algorithm a)
{
    switch (a) {
    case Algorithm::pso:
        return "PSO";
    case Algorithm::de:
        return "DE";
    case Algorithm::ga:
        return "GA";
    case Algorithm::cmaes:
        return "CMA-ES";
    case Algorithm::gbo:
        return "GBO";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s)
{
    for (auto a : all_algorithms)
        if (s == to_string(a))
            return a;
    throw std::invalid_argument("unknown algorithm: " + std::string(s));
}

struct Dimension {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool integer = false;

    double clamp(double x) const { return std::clamp(x, lo, hi); }
    double width() const { return hi - lo; }
};

struct SearchSpace {
    std::vector<Dimension> dims;
    std::optional<StrategyCategory> category;

    std::size_t size() const { return dims.size(); }
    bool empty() const { return dims.empty(); }

    /// Clamps into the box and rounds integer dimensions to nearest.
    std::vector<double> repair(std::span<const double> x) const
    {
        std::vector<double> out(x.begin(), x.end());
        for (std::size_t j = 0; j < dims.size(); ++j) {
            const auto& d = dims[j];
            double v = std::isnan(out[j]) ? d.lo : d.clamp(out[j]);
            if (d.integer)
                v = d.clamp(std::round(v));
            out[j] = v;
        }
        return out;
    }

    void clamp(std::vector<double>& x) const
    {
        for (std::size_t j = 0; j < dims.size(); ++j)
            x[j] = std::isnan(x[j]) ? dims[j].lo : dims[j].clamp(x[j]);
    }

    /// Uniform box of `n` real dimensions.
    static SearchSpace box(std::size_t n, double lo, double hi)
    {
        SearchSpace s;
        for (std::size_t j = 0; j < n; ++j)
            s.dims.push_back({"x" + std::to_string(j), lo, hi, false});
        return s;
    }

    /// Free DTS attributes of a category: A1, [A4, A5,] A6, A7, A8.
    static SearchSpace for_category(StrategyCategory cat, const AttributeEnvelope& env = {})
    {
        SearchSpace s;
        s.category = cat;
        s.dims.push_back({"A1", env.mempool_size.lo, env.mempool_size.hi, true});
        if (cat.designated_space) {
            s.dims.push_back({"A4", env.small_fee_threshold.lo, env.small_fee_threshold.hi, false});
            s.dims.push_back({"A5", env.small_fee_count.lo, env.small_fee_count.hi, true});
        }
        s.dims.push_back({"A6", env.max_trx_nodes.lo, env.max_trx_nodes.hi, true});
        s.dims.push_back({"A7", env.scale.lo, env.scale.hi, false});
        s.dims.push_back({"A8", env.shape.lo, env.shape.hi, false});
        return s;
    }
};

/// Maps a category-space vector back to DTS free attributes.
inline FreeAttributes to_attributes(const SearchSpace& space, std::span<const double> x)
{
    if (!space.category)
        throw std::invalid_argument("search space has no strategy category");
    if (x.size() != space.size())
        throw std::invalid_argument("candidate dimension does not match search space");
    FreeAttributes a;
    std::size_t j = 0;
    a.mempool_size = std::llround(x[j++]);
    if (space.category->designated_space) {
        a.small_fee_threshold = x[j++];
        a.small_fee_count = std::llround(x[j++]);
    }
    a.max_trx_nodes = std::llround(x[j++]);
    a.scale = x[j++];
    a.shape = x[j++];
    return a;
}

inline std::vector<double> from_attributes(const SearchSpace& space, const FreeAttributes& a)
{
    std::vector<double> x{double(a.mempool_size)};
    if (space.category && space.category->designated_space) {
        x.push_back(a.small_fee_threshold.value_or(0.0));
        x.push_back(double(a.small_fee_count.value_or(0)));
    }
    x.push_back(double(a.max_trx_nodes));
    x.push_back(a.scale);
    x.push_back(a.shape);
    return x;
}

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::pso;
    int n_pop = 50;
    int max_gen = 100;
    std::int64_t n_eval = 5000;
    std::uint64_t rng_seed = 2024;
    int jobs = 1;
    // PSO: constriction from k, phi1, phi2
    double pso_k = 1.0;
    double pso_phi1 = 2.05;
    double pso_phi2 = 2.05;
    // DE/rand/1/bin
    double de_f = 0.5;
    double de_cr = 0.9;
    // GA
    int ga_tournament = 2;
    double ga_crossover = 0.9;
    double ga_mutation_rate = 0.0;  // 0 selects 1/dim
    double ga_sigma_start = 0.1;    // fraction of each dimension's width
    double ga_sigma_end = 0.001;
    int ga_elites = 1;
    // CMA-ES, in coordinates normalised to the unit box
    double cmaes_sigma0 = 0.3;
    // GBO
    double gbo_pr = 0.5;
};

struct Candidate {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
};

struct OptimizationRun {
    Algorithm algorithm = Algorithm::pso;
    Candidate best;
    std::vector<double> trace; // best-so-far after each generation, initial population first
    std::int64_t evaluations = 0;

    friend bool operator==(const OptimizationRun& a, const OptimizationRun& b)
    {
        return a.algorithm == b.algorithm && a.best.x == b.best.x && a.best.value == b.best.value &&
               a.trace == b.trace && a.evaluations == b.evaluations;
    }
};

using Objective = std::function<double(std::span<const double>)>;

/// Budgeted objective front-end shared by all algorithms: repairs points,
/// evaluates a generation (optionally on several threads), and keeps the
/// best-so-far and its trace.
class Evaluator {
public:
    Evaluator(const SearchSpace& space, Objective f, std::int64_t budget, int jobs)
        : space_(space), f_(std::move(f)), budget_(budget), jobs_(std::max(1, jobs))
    {
        if (space_.empty())
            throw std::invalid_argument("optimizer: empty search space");
        if (budget_ <= 0)
            throw std::invalid_argument("optimizer: evaluation budget must be positive");
    }

    std::int64_t remaining() const { return budget_ - used_; }
    std::int64_t used() const { return used_; }
    bool exhausted() const { return used_ >= budget_; }
    const Candidate& best() const { return best_; }
    const std::vector<double>& trace() const { return trace_; }
    const SearchSpace& space() const { return space_; }

    /// Evaluates as many of `xs` as the budget allows; the rest get +inf.
    /// The objective sees repaired copies (integer dimensions rounded), the
    /// caller's continuous positions are left alone. Appends one trace entry.
    std::vector<double> evaluate(const std::vector<std::vector<double>>& raw)
    {
        const std::size_t n = std::min<std::size_t>(raw.size(), std::size_t(std::max<std::int64_t>(0, remaining())));
        std::vector<double> values(raw.size(), std::numeric_limits<double>::infinity());
        std::vector<std::vector<double>> xs;
        xs.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            xs.push_back(space_.repair(raw[i]));

        auto one = [&](std::size_t i) {
            double v = f_(xs[i]);
            values[i] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        };
        const int threads = std::min<int>(jobs_, int(n));
        if (threads <= 1) {
            for (std::size_t i = 0; i < n; ++i)
                one(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i; (i = next.fetch_add(1)) < n;)
                        one(i);
                });
        }
        used_ += std::int64_t(n);
        for (std::size_t i = 0; i < n; ++i)
            if (best_.x.empty() || values[i] < best_.value)
                best_ = {xs[i], values[i]};
        trace_.push_back(best_.value);
        return values;
    }

    OptimizationRun finish(Algorithm a) const { return {a, best_, trace_, used_}; }

private:
    const SearchSpace& space_;
    Objective f_;
    std::int64_t budget_;
    int jobs_;
    std::int64_t used_ = 0;
    Candidate best_;
    std::vector<double> trace_;
};

inline std::vector<double> uniform_point(const SearchSpace& s, std::mt19937_64& rng)
{
    std::vector<double> x(s.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        x[j] = std::uniform_real_distribution<double>(s.dims[j].lo, s.dims[j].hi)(rng);
    return x;
}

inline std::vector<std::vector<double>> uniform_population(const SearchSpace& s, int n, std::mt19937_64& rng)
{
    std::vector<std::vector<double>> pop;
    pop.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i)
        pop.push_back(uniform_point(s, rng));
    return pop;
}

inline double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double gauss(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t pick(std::size_t n, std::mt19937_64& rng)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// `count` distinct indices in [0, n) excluding `skip`.
inline std::vector<std::size_t> distinct_indices(std::size_t n, std::size_t count, std::size_t skip,
                                                 std::mt19937_64& rng)
{
    if (n < count + 1)
        throw std::invalid_argument("optimizer: population too small");
    std::vector<std::size_t> out;
    while (out.size() < count) {
        const std::size_t r = pick(n, rng);
        if (r != skip && std::find(out.begin(), out.end(), r) == out.end())
            out.push_back(r);
    }
    return out;
}

inline void check_config(const OptimizerConfig& c)
{
    if (c.n_pop < 1)
        throw std::invalid_argument("optimizer: population size must be positive");
    if (c.n_eval < 1)
        throw std::invalid_argument("optimizer: evaluation budget must be positive");
    if (c.max_gen < 1)
        throw std::invalid_argument("optimizer: max_gen must be positive");
}

/// Update generations after the initial population: bounded by max_gen
/// (which counts the initial population) and by the evaluation budget.
inline int generation_count(const OptimizerConfig& c)
{
    const std::int64_t by_budget = std::max<std::int64_t>(0, (c.n_eval - c.n_pop + c.n_pop - 1) / c.n_pop);
    return int(std::min<std::int64_t>(by_budget, std::max(0, c.max_gen - 1)));
}

} // namespace dts::opt
