#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dts/core.hpp"

namespace dts {

enum class ReturnSource { block, daily_average };

struct ReturnSeries {
    std::vector<double> values;
    ReturnSource source = ReturnSource::block;
};

/// R_n = ln(I_n / I_{n-1}).
inline ReturnSeries log_returns(std::span<const double> incentives, ReturnSource source = ReturnSource::block)
{
    if (incentives.size() < 2)
        throw std::invalid_argument("log_returns: need at least 2 values");
    for (std::size_t i = 0; i < incentives.size(); ++i)
        if (!(incentives[i] > 0.0))
            throw std::domain_error("log_returns: non-positive incentive at index " + std::to_string(i));
    ReturnSeries r;
    r.source = source;
    r.values.reserve(incentives.size() - 1);
    for (std::size_t i = 1; i < incentives.size(); ++i)
        r.values.push_back(std::log(incentives[i] / incentives[i - 1]));
    return r;
}

/// Sample standard deviation (n - 1 denominator) about the mean return.
inline double volatility(std::span<const double> returns)
{
    const std::size_t n = returns.size();
    if (n < 2)
        throw std::invalid_argument("volatility: need at least 2 returns");
    double mean = 0.0;
    for (double r : returns)
        mean += r;
    mean /= double(n);
    double ss = 0.0;
    for (double r : returns)
        ss += (r - mean) * (r - mean);
    return std::sqrt(ss / double(n - 1));
}

inline double volatility(const ReturnSeries& r) { return volatility(r.values); }

/// Volatility of the `window` returns ending at each return index, oldest first.
inline std::vector<double> rolling_volatility(std::span<const double> incentives, std::size_t window)
{
    if (window < 2)
        throw std::invalid_argument("rolling_volatility: window must be at least 2");
    if (incentives.size() < 2 || incentives.size() - 1 < window)
        throw std::invalid_argument("rolling_volatility: window larger than the return series");
    const auto r = log_returns(incentives);
    std::vector<double> out;
    out.reserve(r.values.size() - window + 1);
    for (std::size_t end = window; end <= r.values.size(); ++end)
        out.push_back(volatility(std::span<const double>(r.values).subspan(end - window, window)));
    return out;
}

struct IncentiveSeries {
    std::vector<double> values;
    std::size_t excluded_zero = 0;
};

/// Sealed-block incentives with zero-incentive blocks dropped.
inline IncentiveSeries incentive_series(std::span<const BlockRecord> blocks)
{
    IncentiveSeries s;
    s.values.reserve(blocks.size());
    for (const auto& b : blocks) {
        if (b.incentive > 0.0)
            s.values.push_back(b.incentive);
        else
            ++s.excluded_zero;
    }
    return s;
}

/// Whole-run volatility of a block sequence; NaN when fewer than three usable blocks.
inline double block_volatility(std::span<const BlockRecord> blocks)
{
    const auto s = incentive_series(blocks);
    if (s.values.size() < 3)
        return std::nan("");
    return volatility(log_returns(s.values));
}

struct HistoricalVolatility {
    int year;
    double value;
};

// Bitcoin average daily block incentive volatility, 2012-2020.
inline constexpr std::array<HistoricalVolatility, 9> historical_volatility{{
    {2012, 0.238111},
    {2013, 0.200857},
    {2014, 0.218010},
    {2015, 0.180948},
    {2016, 0.073051},
    {2017, 0.063965},
    {2018, 0.045616},
    {2019, 0.037647},
    {2020, 0.059485},
}};

inline constexpr double historical_min = 0.037647;
inline constexpr double historical_max = 0.238111;

enum class BenchmarkClass { below, within, above };

inline std::string_view to_string(BenchmarkClass c)
{
    switch (c) {
    case BenchmarkClass::below:
        return "below";
    case BenchmarkClass::within:
        return "within";
    case BenchmarkClass::above:
        return "above";
    }
    return "?";
}

inline BenchmarkClass benchmark_check(double vol)
{
    if (!(vol >= 0.0))
        throw std::domain_error("benchmark_check: volatility must be non-negative");
    if (vol < historical_min)
        return BenchmarkClass::below;
    if (vol > historical_max)
        return BenchmarkClass::above;
    return BenchmarkClass::within;
}

} // namespace dts
