#include <gtest/gtest.h>

#include "dts/mempool.hpp"

using namespace dts;

namespace {

Transaction tx(TxId id, double fee, std::int64_t t) { return Transaction{id, fee / 0.002, fee, t, 300}; }

DtsStrategy with_priority(Priority p)
{
    DtsStrategy s;
    s.priority = p;
    return s;
}

} // namespace

TEST(Mempool, AcceptsBelowCapacity)
{
    Mempool pool(2);
    EXPECT_EQ(pool.submit(tx(1, 5, 0)).status, Mempool::SubmitStatus::accepted);
    EXPECT_EQ(pool.size(), 1u);
}

TEST(Mempool, EvictsLowestFeeForRicherNewcomer)
{
    Mempool pool(2);
    pool.submit(tx(1, 5, 0));
    pool.submit(tx(2, 9, 1));
    const auto r = pool.submit(tx(3, 7, 2));
    EXPECT_EQ(r.status, Mempool::SubmitStatus::evicted);
    ASSERT_TRUE(r.dropped);
    EXPECT_EQ(r.dropped->id, 1u);
    EXPECT_TRUE(pool.contains(2));
    EXPECT_TRUE(pool.contains(3));
    EXPECT_FALSE(pool.contains(1));
}

TEST(Mempool, RejectsPoorerNewcomer)
{
    Mempool pool(2);
    pool.submit(tx(1, 5, 0));
    pool.submit(tx(2, 9, 1));
    auto r = pool.submit(tx(3, 1, 2));
    EXPECT_EQ(r.status, Mempool::SubmitStatus::rejected);
    EXPECT_EQ(r.dropped->id, 3u);
    r = pool.submit(tx(4, 5, 3)); // equal fee does not displace
    EXPECT_EQ(r.status, Mempool::SubmitStatus::rejected);
    EXPECT_EQ(pool.size(), 2u);
}

TEST(Mempool, EvictsLatestAmongEqualLowestFees)
{
    Mempool pool(3);
    pool.submit(tx(1, 2, 0));
    pool.submit(tx(2, 2, 5));
    pool.submit(tx(3, 9, 6));
    EXPECT_EQ(pool.submit(tx(4, 3, 7)).dropped->id, 2u);
}

TEST(Mempool, DuplicateIdThrows)
{
    Mempool pool(3);
    pool.submit(tx(1, 2, 0));
    EXPECT_THROW(pool.submit(tx(1, 3, 1)), std::invalid_argument);
}

TEST(Mempool, SelectNextByPriority)
{
    Mempool pool(10);
    pool.submit(tx(1, 9, 1));
    pool.submit(tx(2, 100, 2));
    EXPECT_EQ(select_next(pool, with_priority(Priority::time_based))->id, 1u);
    EXPECT_EQ(select_next(pool, with_priority(Priority::fee_based))->id, 2u);
}

TEST(Mempool, TieBreaks)
{
    Mempool pool(10);
    pool.submit(tx(7, 5, 3));
    pool.submit(tx(4, 5, 3));
    EXPECT_EQ(select_next(pool, with_priority(Priority::time_based))->id, 4u);
    EXPECT_EQ(select_next(pool, with_priority(Priority::fee_based))->id, 4u);

    Mempool p2(10);
    p2.submit(tx(1, 5, 3));
    p2.submit(tx(2, 8, 3)); // same time: higher fee first
    p2.submit(tx(3, 8, 1)); // same fee: earlier first
    EXPECT_EQ(select_next(p2, with_priority(Priority::time_based))->id, 3u);
    p2.take(3);
    EXPECT_EQ(select_next(p2, with_priority(Priority::time_based))->id, 2u);
    EXPECT_EQ(select_next(p2, with_priority(Priority::fee_based))->id, 2u);
}

TEST(Mempool, EmptyPoolSelectsNothing)
{
    Mempool pool(1);
    EXPECT_EQ(select_next(pool, with_priority(Priority::fee_based)), nullptr);
    EXPECT_EQ(pool.earliest_small_fee(), nullptr);
}

TEST(Mempool, SmallFeeIndex)
{
    Mempool pool(10, 1.41);
    pool.submit(tx(1, 3.0, 0));
    pool.submit(tx(2, 1.0, 5));
    pool.submit(tx(3, 0.5, 9));
    EXPECT_EQ(pool.earliest_small_fee()->id, 2u);
    pool.take(2);
    EXPECT_EQ(pool.earliest_small_fee()->id, 3u);
    pool.take(3);
    EXPECT_EQ(pool.earliest_small_fee(), nullptr);
}

TEST(Mempool, NeverExceedsCapacity)
{
    Mempool pool(50);
    for (TxId i = 0; i < 1000; ++i) {
        pool.submit(tx(i, double((i * 7919) % 101) + 1.0, std::int64_t(i)));
        ASSERT_LE(pool.size(), 50u);
    }
}
