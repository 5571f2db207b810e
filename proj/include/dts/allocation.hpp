#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

#include "dts/core.hpp"
#include "dts/numeric.hpp"

namespace dts {

/// Parameters of the fee -> leaf-node allocation curve.
struct AllocationParams {
    double scale = 0.0;             // mu
    double shape = 1.0;             // sigma
    std::int64_t max_trx_nodes = 1; // A6

    static AllocationParams from(const DtsStrategy& s) { return {s.scale, s.shape, s.max_trx_nodes}; }
};

/// Smallest fee the allocation curve accepts; zero fees are lifted to this.
inline constexpr double min_positive_fee = std::numeric_limits<double>::min();

// Written through erfc so the lower tail keeps full relative precision.
inline double lognormal_cdf(double x, const AllocationParams& p)
{
    if (!(x > 0.0))
        throw std::domain_error("lognormal_cdf: x must be positive");
    if (!(p.shape > 0.0))
        throw std::domain_error("lognormal_cdf: shape must be positive");
    if (std::isinf(x))
        return 1.0;
    const double z = (std::log(x) - p.scale) / (p.shape * std::numbers::sqrt2);
    return 0.5 * std::erfc(-z);
}

/// Leaf nodes occupied by a transaction paying `fee`: ceil(F(fee) * A6), at least one.
inline std::int64_t leaf_nodes(double fee, const AllocationParams& p)
{
    if (!(fee > 0.0))
        throw std::domain_error("leaf_nodes: fee must be positive");
    if (p.max_trx_nodes < 1)
        throw std::domain_error("leaf_nodes: max_trx_nodes must be at least 1");
    const double raw = std::ceil(lognormal_cdf(fee, p) * double(p.max_trx_nodes));
    if (raw < 1.0)
        return 1;
    if (raw > double(p.max_trx_nodes))
        return p.max_trx_nodes;
    return static_cast<std::int64_t>(raw);
}

inline constexpr bool fits(std::int64_t occupied, std::int64_t tx_nodes, std::int64_t capacity) noexcept
{
    return occupied + tx_nodes <= capacity;
}

inline double block_incentive(std::span<const double> fees)
{
    CompensatedSum s;
    for (double f : fees) {
        if (!(f >= 0.0))
            throw std::domain_error("block_incentive: fees must be non-negative");
        s += f;
    }
    return s.value();
}

} // namespace dts
