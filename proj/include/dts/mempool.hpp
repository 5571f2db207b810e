#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "dts/core.hpp"

namespace dts {

/// Bounded pool of pending transactions, indexed by arrival and by fee.
///
/// Time order: earliest arrival, then higher fee, then lower id.
/// Fee order: higher fee, then earlier arrival, then lower id. The last
/// element in fee order is the eviction candidate.
class Mempool {
public:
    enum class SubmitStatus { accepted, evicted, rejected };

    struct SubmitResult {
        SubmitStatus status = SubmitStatus::accepted;
        std::optional<Transaction> dropped; // evicted incumbent or the rejected newcomer
    };

    explicit Mempool(std::int64_t capacity, std::optional<double> small_fee_threshold = std::nullopt)
        : capacity_(capacity), small_fee_threshold_(small_fee_threshold)
    {
        if (capacity_ < 1)
            throw std::invalid_argument("Mempool: capacity must be positive");
    }

    std::int64_t capacity() const { return capacity_; }
    std::size_t size() const { return txs_.size(); }
    bool empty() const { return txs_.empty(); }
    bool full() const { return std::int64_t(txs_.size()) >= capacity_; }
    bool contains(TxId id) const { return txs_.contains(id); }

    /// Accepts while below capacity; otherwise the lowest-fee pending
    /// transaction is evicted if the newcomer pays strictly more, else the
    /// newcomer is rejected.
    SubmitResult submit(const Transaction& tx)
    {
        if (txs_.contains(tx.id))
            throw std::invalid_argument("Mempool::submit: duplicate transaction id " + std::to_string(tx.id));
        if (!full()) {
            insert(tx);
            return {SubmitStatus::accepted, std::nullopt};
        }
        const auto lowest = std::prev(by_fee_.end());
        const Transaction& victim = txs_.at(lowest->id);
        if (tx.fee > victim.fee) {
            Transaction out = victim;
            erase(out.id);
            insert(tx);
            return {SubmitStatus::evicted, out};
        }
        return {SubmitStatus::rejected, tx};
    }

    const Transaction* earliest() const { return by_time_.empty() ? nullptr : &txs_.at(by_time_.begin()->id); }
    const Transaction* highest_fee() const { return by_fee_.empty() ? nullptr : &txs_.at(by_fee_.begin()->id); }

    /// Earliest pending transaction with fee below the small-fee threshold.
    const Transaction* earliest_small_fee() const
    {
        return small_.empty() ? nullptr : &txs_.at(small_.begin()->id);
    }

    Transaction take(TxId id)
    {
        auto it = txs_.find(id);
        if (it == txs_.end())
            throw std::out_of_range("Mempool::take: unknown transaction id");
        Transaction tx = it->second;
        erase(id);
        return tx;
    }

    template <typename F>
    void for_each(F&& f) const
    {
        for (const auto& k : by_time_)
            f(txs_.at(k.id));
    }

private:
    struct TimeKey {
        std::int64_t arrival;
        double fee;
        TxId id;
        bool operator<(const TimeKey& o) const
        {
            return std::tie(arrival, o.fee, id) < std::tie(o.arrival, fee, o.id);
        }
    };
    struct FeeKey {
        double fee;
        std::int64_t arrival;
        TxId id;
        bool operator<(const FeeKey& o) const
        {
            return std::tie(o.fee, arrival, id) < std::tie(fee, o.arrival, o.id);
        }
    };

    bool is_small(const Transaction& tx) const { return small_fee_threshold_ && tx.fee < *small_fee_threshold_; }

    void insert(const Transaction& tx)
    {
        txs_.emplace(tx.id, tx);
        by_time_.insert({tx.arrival_ms, tx.fee, tx.id});
        by_fee_.insert({tx.fee, tx.arrival_ms, tx.id});
        if (is_small(tx))
            small_.insert({tx.arrival_ms, tx.fee, tx.id});
    }

    void erase(TxId id)
    {
        const Transaction& tx = txs_.at(id);
        by_time_.erase({tx.arrival_ms, tx.fee, tx.id});
        by_fee_.erase({tx.fee, tx.arrival_ms, tx.id});
        if (is_small(tx))
            small_.erase({tx.arrival_ms, tx.fee, tx.id});
        txs_.erase(id);
    }

    std::int64_t capacity_;
    std::optional<double> small_fee_threshold_;
    std::unordered_map<TxId, Transaction> txs_;
    std::set<TimeKey> by_time_;
    std::set<FeeKey> by_fee_;
    std::set<TimeKey> small_;
};

/// Next transaction under the strategy's incorporation priority, or null when empty.
inline const Transaction* select_next(const Mempool& pool, const DtsStrategy& s)
{
    return s.priority == Priority::time_based ? pool.earliest() : pool.highest_fee();
}

} // namespace dts
