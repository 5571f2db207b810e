#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dts/digest.hpp"

namespace dts {

inline constexpr double default_commission_ratio = 0.002;
inline constexpr std::int64_t default_leaf_capacity = 2100;
inline constexpr double default_arrival_rate_tps = 3.5;
inline constexpr std::uint32_t default_tx_size_bytes = 300;

using TxId = std::uint64_t;

struct Transaction {
    TxId id = 0;
    double amount = 0.0;
    double fee = 0.0;
    std::int64_t arrival_ms = 0;
    std::uint32_t size_bytes = default_tx_size_bytes;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Builds a transaction whose fee follows the commission ratio.
inline Transaction make_transaction(TxId id, double amount, std::int64_t arrival_ms,
                                    double commission_ratio = default_commission_ratio)
{
    if (!(amount >= 0.0))
        throw std::invalid_argument("transaction amount must be non-negative");
    return Transaction{id, amount, amount * commission_ratio, arrival_ms, default_tx_size_bytes};
}

enum class Priority { time_based, fee_based };

inline std::string_view to_string(Priority p)
{
    return p == Priority::time_based ? "time-based" : "fee-based";
}

struct StrategyCategory {
    int id = 0;
    Priority priority = Priority::time_based;
    bool designated_space = false;

    friend bool operator==(const StrategyCategory&, const StrategyCategory&) = default;
};

// Categories 1..4: priority (A2) x designated small-fee space (A3).
inline constexpr std::array<StrategyCategory, 4> strategy_categories{{
    {1, Priority::time_based, true},
    {2, Priority::time_based, false},
    {3, Priority::fee_based, true},
    {4, Priority::fee_based, false},
}};

inline StrategyCategory category_by_id(int id)
{
    if (id < 1 || id > 4)
        throw std::invalid_argument("strategy category must be in 1..4, got " + std::to_string(id));
    return strategy_categories[static_cast<std::size_t>(id - 1)];
}

inline int category_id(Priority p, bool designated_space)
{
    for (const auto& c : strategy_categories)
        if (c.priority == p && c.designated_space == designated_space)
            return c.id;
    return 0; // unreachable
}

/// The eight DTS attributes A1..A8.
struct DtsStrategy {
    std::int64_t mempool_size = 1;                   // A1
    Priority priority = Priority::time_based;        // A2
    bool designated_space = false;                   // A3
    std::optional<double> small_fee_threshold;       // A4, iff A3
    std::optional<std::int64_t> small_fee_count;     // A5, iff A3
    std::int64_t max_trx_nodes = 1;                  // A6
    double scale = 0.0;                              // A7 (mu)
    double shape = 1.0;                              // A8 (sigma)

    int category() const { return category_id(priority, designated_space); }

    friend bool operator==(const DtsStrategy&, const DtsStrategy&) = default;
};

/// The attributes left free once a category fixes A2 and A3.
struct FreeAttributes {
    std::int64_t mempool_size = 0;
    std::optional<double> small_fee_threshold;
    std::optional<std::int64_t> small_fee_count;
    std::int64_t max_trx_nodes = 0;
    double scale = 0.0;
    double shape = 0.0;

    friend bool operator==(const FreeAttributes&, const FreeAttributes&) = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Admissible ranges for the free attributes; also the default optimizer search box.
struct AttributeEnvelope {
    Interval mempool_size{1000, 80000};
    Interval small_fee_threshold{1.0, 2.0};
    Interval small_fee_count{0, 200};
    Interval max_trx_nodes{10, 800};
    Interval scale{4.0, 10.0};
    Interval shape{0.1, 1.0};
};

inline FreeAttributes free_attributes(const DtsStrategy& s)
{
    return {s.mempool_size, s.small_fee_threshold, s.small_fee_count, s.max_trx_nodes, s.scale, s.shape};
}

inline DtsStrategy strategy_from_category(StrategyCategory category, const FreeAttributes& a,
                                          const AttributeEnvelope& env = {})
{
    std::string err;
    auto check = [&err](bool ok, std::string_view msg) {
        if (!ok) {
            if (!err.empty())
                err += "; ";
            err += msg;
        }
    };

    if (category.designated_space) {
        check(a.small_fee_threshold.has_value(), "A4 (small-fee threshold) required by category");
        check(a.small_fee_count.has_value(), "A5 (small-fee count) required by category");
    } else {
        check(!a.small_fee_threshold, "A4 (small-fee threshold) not allowed without designated space");
        check(!a.small_fee_count, "A5 (small-fee count) not allowed without designated space");
    }
    check(env.mempool_size.contains(double(a.mempool_size)), "A1 (mempool size) out of bounds");
    check(env.max_trx_nodes.contains(double(a.max_trx_nodes)), "A6 (max leaf nodes) out of bounds");
    check(env.scale.contains(a.scale), "A7 (scale) out of bounds");
    check(env.shape.contains(a.shape) && a.shape > 0.0, "A8 (shape) out of bounds");
    if (a.small_fee_threshold)
        check(env.small_fee_threshold.contains(*a.small_fee_threshold), "A4 (small-fee threshold) out of bounds");
    if (a.small_fee_count)
        check(env.small_fee_count.contains(double(*a.small_fee_count)), "A5 (small-fee count) out of bounds");

    if (!err.empty())
        throw std::invalid_argument("category " + std::to_string(category.id) + ": " + err);

    DtsStrategy s;
    s.mempool_size = a.mempool_size;
    s.priority = category.priority;
    s.designated_space = category.designated_space;
    s.small_fee_threshold = a.small_fee_threshold;
    s.small_fee_count = a.small_fee_count;
    s.max_trx_nodes = a.max_trx_nodes;
    s.scale = a.scale;
    s.shape = a.shape;
    return s;
}

struct SimulationConfig {
    std::int64_t leaf_capacity = default_leaf_capacity;
    double commission_ratio = default_commission_ratio;
    double arrival_rate_tps = default_arrival_rate_tps;
    std::uint64_t rng_seed = 2024;
    std::int64_t transaction_budget = 400000;
    int verkle_branching_factor = 5;
    // Spacing of block-production slots. 0 selects continuous mode (the
    // miner pulls whenever the mempool is full); unset derives
    // leaf_capacity / arrival_rate, the interval at which one-leaf
    // transactions exactly match the arrival rate.
    std::optional<std::int64_t> block_interval_ms;
    bool flush_tail = false;
    bool build_trees = true;

    std::int64_t effective_block_interval_ms() const
    {
        if (block_interval_ms)
            return *block_interval_ms;
        return static_cast<std::int64_t>(std::llround(1000.0 * double(leaf_capacity) / arrival_rate_tps));
    }
};

/// Every violated invariant of `s` under `cfg`; empty when valid.
inline std::vector<std::string> validate_strategy(const DtsStrategy& s, const SimulationConfig& cfg)
{
    std::vector<std::string> v;
    if (s.mempool_size < 1)
        v.emplace_back("mempool size must be positive");
    if (!(s.shape > 0.0) || !std::isfinite(s.shape))
        v.emplace_back("shape must be positive");
    if (!std::isfinite(s.scale))
        v.emplace_back("scale must be finite");
    if (s.max_trx_nodes < 1)
        v.emplace_back("max_trx_nodes must be at least 1");
    if (s.max_trx_nodes > cfg.leaf_capacity)
        v.emplace_back("max_trx_nodes exceeds leaf capacity");
    if (s.designated_space) {
        if (!s.small_fee_threshold)
            v.emplace_back("designated space requires a small-fee threshold");
        if (!s.small_fee_count)
            v.emplace_back("designated space requires a small-fee count");
        else if (*s.small_fee_count < 0)
            v.emplace_back("small-fee count must be non-negative");
    } else if (s.small_fee_threshold || s.small_fee_count) {
        v.emplace_back("small-fee attributes present without designated space");
    }
    if (cfg.leaf_capacity < 1)
        v.emplace_back("leaf capacity must be positive");
    return v;
}

struct BlockRecord {
    std::int64_t height = 0;
    std::vector<TxId> tx_ids;
    std::vector<std::int64_t> tx_nodes; // leaf nodes per included transaction
    std::int64_t occupied_nodes = 0;
    double incentive = 0.0;
    std::int64_t seal_time_ms = 0;
    Digest root{};

    friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

} // namespace dts
