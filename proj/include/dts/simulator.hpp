#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dts/allocation.hpp"
#include "dts/core.hpp"
#include "dts/mempool.hpp"
#include "dts/numeric.hpp"
#include "dts/verkle.hpp"

namespace dts {

/// Block under construction plus everything already sealed.
struct MinerState {
    struct OpenBlock {
        std::vector<TxId> tx_ids;
        std::vector<std::int64_t> tx_nodes;
        std::vector<double> fees;
        std::int64_t occupied_nodes = 0;
        std::int64_t small_fee_slots_used = 0;
        CompensatedSum incentive;

        bool empty() const { return tx_ids.empty(); }
    };

    OpenBlock current;
    std::vector<BlockRecord> sealed;
};

enum class IncorporateOutcome { incorporated, sealed_then_incorporated };

/// Fee handed to the allocation curve; non-positive fees are lifted to the smallest positive value.
inline double allocation_fee(double fee) { return fee > 0.0 ? fee : min_positive_fee; }

/// True when `tx` would take the reserved small-fee path in the current block.
inline bool qualifies_for_reserved_slot(const MinerState& state, const Transaction& tx, const DtsStrategy& s)
{
    return s.designated_space && s.small_fee_threshold && s.small_fee_count && tx.fee < *s.small_fee_threshold &&
           state.current.small_fee_slots_used < *s.small_fee_count;
}

inline BlockRecord seal_block(MinerState& state, std::int64_t seal_time_ms, const SimulationConfig& cfg)
{
    auto& cur = state.current;
    BlockRecord b;
    b.height = std::int64_t(state.sealed.size());
    b.tx_ids = std::move(cur.tx_ids);
    b.tx_nodes = std::move(cur.tx_nodes);
    b.occupied_nodes = cur.occupied_nodes;
    b.incentive = cur.incentive.value();
    b.seal_time_ms = seal_time_ms;
    if (cfg.build_trees && !b.tx_ids.empty()) {
        std::vector<Digest> leaves;
        leaves.reserve(std::size_t(b.occupied_nodes));
        for (std::size_t i = 0; i < b.tx_ids.size(); ++i)
            for (std::int64_t slot = 0; slot < b.tx_nodes[i]; ++slot)
                leaves.push_back(leaf_digest(b.tx_ids[i], std::uint64_t(slot), cur.fees[i]));
        b.root = build_tree(std::move(leaves), std::size_t(cfg.verkle_branching_factor)).root();
    }
    state.sealed.push_back(b);
    cur = {};
    return b;
}

/// Adds `tx` to the open block, sealing it first when the transaction does not fit.
inline IncorporateOutcome try_incorporate(MinerState& state, const Transaction& tx, const DtsStrategy& s,
                                          const SimulationConfig& cfg, std::int64_t now_ms)
{
    const std::int64_t n = leaf_nodes(allocation_fee(tx.fee), AllocationParams::from(s));
    if (n > cfg.leaf_capacity)
        throw std::logic_error("try_incorporate: transaction exceeds an empty block");

    auto outcome = IncorporateOutcome::incorporated;
    if (!state.current.empty() && !fits(state.current.occupied_nodes, n, cfg.leaf_capacity)) {
        seal_block(state, now_ms, cfg);
        outcome = IncorporateOutcome::sealed_then_incorporated;
    }
    auto& cur = state.current;
    if (qualifies_for_reserved_slot(state, tx, s))
        ++cur.small_fee_slots_used;
    cur.tx_ids.push_back(tx.id);
    cur.tx_nodes.push_back(n);
    cur.fees.push_back(tx.fee);
    cur.occupied_nodes += n;
    cur.incentive += tx.fee;
    return outcome;
}

/// Miner's pick for the open block: a pending small-fee transaction while
/// reserved slots remain, otherwise the priority order.
inline const Transaction* select_for_block(const Mempool& pool, const MinerState& state, const DtsStrategy& s)
{
    if (s.designated_space && s.small_fee_count && state.current.small_fee_slots_used < *s.small_fee_count) {
        if (const Transaction* small = pool.earliest_small_fee())
            return small;
    }
    return select_next(pool, s);
}

struct RunStats {
    std::int64_t submitted = 0;
    std::int64_t included = 0;     // in sealed blocks
    std::int64_t in_open_block = 0;
    std::int64_t pending = 0;      // still in the mempool
    std::int64_t evicted = 0;
    std::int64_t rejected = 0;
    std::int64_t reserved_admissions = 0;
    double submitted_fees = 0.0;
    double sealed_fees = 0.0;
    double open_block_fees = 0.0;
    double pending_fees = 0.0;
    double dropped_fees = 0.0; // evicted + rejected
};

struct SimulationResult {
    std::vector<BlockRecord> blocks;
    MinerState::OpenBlock open_block;
    std::vector<Transaction> pending;
    std::vector<TxId> dropped;
    RunStats stats;
};

/// Replays an arrival-ordered stream through the mempool and miner.
///
/// With a positive block interval the miner fills the open block at every
/// slot time until a selected transaction does not fit; that transaction
/// opens the next block and the miner waits for the next slot. With an
/// interval of 0 the miner pulls one transaction whenever the mempool is
/// full. Blocks are sealed only on overflow, or at end of stream when
/// `flush_tail` is set.
inline SimulationResult run(std::span<const Transaction> dataset, const DtsStrategy& s, const SimulationConfig& cfg)
{
    if (auto v = validate_strategy(s, cfg); !v.empty())
        throw std::invalid_argument("run: invalid strategy: " + v.front());

    SimulationResult res;
    Mempool pool(s.mempool_size, s.designated_space ? s.small_fee_threshold : std::nullopt);
    MinerState state;
    CompensatedSum submitted, dropped;

    auto pull = [&](std::int64_t now) -> std::optional<IncorporateOutcome> {
        const Transaction* pick = select_for_block(pool, state, s);
        if (pick == nullptr)
            return std::nullopt;
        const bool reserved = qualifies_for_reserved_slot(state, *pick, s);
        const Transaction tx = pool.take(pick->id);
        auto out = try_incorporate(state, tx, s, cfg, now);
        if (reserved)
            ++res.stats.reserved_admissions;
        return out;
    };

    const std::int64_t interval = cfg.effective_block_interval_ms();
    std::int64_t next_slot = interval;
    std::int64_t last_arrival = std::numeric_limits<std::int64_t>::min();

    for (const auto& tx : dataset) {
        if (tx.arrival_ms < last_arrival)
            throw std::invalid_argument("run: dataset not ordered by arrival time");
        last_arrival = tx.arrival_ms;

        if (interval > 0) {
            while (tx.arrival_ms >= next_slot) {
                if (pool.empty()) { // idle slots until this arrival
                    next_slot += ((tx.arrival_ms - next_slot) / interval + 1) * interval;
                    break;
                }
                while (true) {
                    auto out = pull(next_slot);
                    if (!out || *out == IncorporateOutcome::sealed_then_incorporated)
                        break;
                }
                next_slot += interval;
            }
        }

        ++res.stats.submitted;
        submitted += tx.fee;
        auto r = pool.submit(tx);
        if (r.status != Mempool::SubmitStatus::accepted) {
            (r.status == Mempool::SubmitStatus::evicted ? res.stats.evicted : res.stats.rejected)++;
            dropped += r.dropped->fee;
            res.dropped.push_back(r.dropped->id);
        }

        if (interval == 0) {
            while (pool.full())
                pull(tx.arrival_ms);
        }
    }

    if (cfg.flush_tail && !state.current.empty())
        seal_block(state, last_arrival == std::numeric_limits<std::int64_t>::min() ? 0 : last_arrival, cfg);

    res.blocks = std::move(state.sealed);
    res.open_block = std::move(state.current);
    pool.for_each([&](const Transaction& t) { res.pending.push_back(t); });

    CompensatedSum sealed, pending;
    for (const auto& b : res.blocks) {
        res.stats.included += std::int64_t(b.tx_ids.size());
        sealed += b.incentive;
    }
    for (const auto& t : res.pending)
        pending += t.fee;
    res.stats.in_open_block = std::int64_t(res.open_block.tx_ids.size());
    res.stats.pending = std::int64_t(res.pending.size());
    res.stats.submitted_fees = submitted.value();
    res.stats.sealed_fees = sealed.value();
    res.stats.open_block_fees = res.open_block.incentive.value();
    res.stats.pending_fees = pending.value();
    res.stats.dropped_fees = dropped.value();
    return res;
}

/// Block series CSV: height, tx_count, occupied_nodes, incentive, seal_time.
inline void write_blocks_csv(std::ostream& os, std::span<const BlockRecord> blocks)
{
    os << "height,tx_count,occupied_nodes,incentive,seal_time\n";
    char buf[64];
    for (const auto& b : blocks) {
        std::snprintf(buf, sizeof buf, "%.17g", b.incentive);
        os << b.height << ',' << b.tx_ids.size() << ',' << b.occupied_nodes << ',' << buf << ',' << b.seal_time_ms
           << '\n';
    }
}

/// Per-transaction assignment CSV: height, tx_id, fee, leaf_nodes.
inline void write_assignment_csv(std::ostream& os, std::span<const BlockRecord> blocks,
                                 std::span<const Transaction> universe)
{
    std::unordered_map<TxId, double> fee_of;
    fee_of.reserve(universe.size());
    for (const auto& t : universe)
        fee_of.emplace(t.id, t.fee);
    os << "height,tx_id,fee,leaf_nodes\n";
    char buf[64];
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.tx_ids.size(); ++i) {
            auto it = fee_of.find(b.tx_ids[i]);
            std::snprintf(buf, sizeof buf, "%.17g", it == fee_of.end() ? 0.0 : it->second);
            os << b.height << ',' << b.tx_ids[i] << ',' << buf << ',' << b.tx_nodes[i] << '\n';
        }
    }
}

} // namespace dts
