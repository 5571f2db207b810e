#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dts/allocation.hpp"
#include "oracle.hpp"

using namespace dts;

namespace {

struct CdfPoint {
    double x, mu, sigma, f;
};

// Reference values from a 50-digit erf evaluation, frozen before the build.
const std::vector<CdfPoint> cdf_table{
    {0.5, 0.0, 1.0, 0.24410859578558273401},
    {1.0, 0.0, 1.0, 0.5},
    {2.0, 0.0, 1.0, 0.75589140421441726599},
    {10.0, 0.0, 0.5, 0.99999793935660402828},
    {0.001, 0.0, 2.0, 0.00027629401672470845333},
    {1000.0, 6.94, 1.0, 0.48713844624497364817},
    {2000.0, 6.94, 1.0, 0.74566256567160984945},
    {5000.0, 6.94, 0.3, 0.99999992691135830135},
    {50.0, 6.94, 1.0, 0.0012309841451941185998},
    {2.0, 6.94, 1.0, 2.0940267597272167588e-10},
    {1.41, 6.94, 0.73, 8.1122335412213889042e-20},
    {1e6, 6.94, 1.0, 0.99999999999691158841},
    {148.0, 6.94, 1.0, 0.026020905743155558895},
    {1032.0, 6.94, 0.1, 0.49702370293493368444},
    {400.0, 5.32, 0.16, 0.99998645560082101455},
    {30000.0, 9.7, 0.47, 0.90245091151758548728},
    {7.0, 1.5, 2.5, 0.57078146352738044141},
    {0.01, -2.0, 0.7, 0.000098954114656945233848},
    {123.456, 4.7, 0.98, 0.54706513935612760331},
    {1e5, 7.26, 0.26, 1.0},
};

AllocationParams reference() { return {6.94, 1.0, 110}; }

} // namespace

TEST(Allocation, CdfMatchesFrozenTable)
{
    for (const auto& p : cdf_table) {
        const double got = lognormal_cdf(p.x, {p.mu, p.sigma, 1});
        EXPECT_LE(std::abs(got - p.f), 1e-12 * p.f) << "x=" << p.x << " mu=" << p.mu << " sigma=" << p.sigma;
    }
}

TEST(Allocation, CdfMatchesMultiprecisionOracle)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logx(-5.0, 15.0), mu(-2.0, 10.0), sigma(0.05, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(logx(rng)), m = mu(rng), s = sigma(rng);
        const double want = oracle::lognormal_cdf(x, m, s);
        const double got = lognormal_cdf(x, {m, s, 1});
        if (want < 1e-300)
            continue;
        EXPECT_LE(std::abs(got - want), 1e-12 * want + 1e-300) << x << ' ' << m << ' ' << s;
    }
}

TEST(Allocation, MedianIsOneHalfForAnyShape)
{
    for (double sigma : {0.1, 0.5, 1.0, 2.0, 7.0})
        EXPECT_DOUBLE_EQ(lognormal_cdf(std::exp(6.94), {6.94, sigma, 1}), 0.5);
}

TEST(Allocation, CdfLimitIsOne)
{
    EXPECT_EQ(lognormal_cdf(std::numeric_limits<double>::infinity(), reference()), 1.0);
    EXPECT_EQ(lognormal_cdf(1e300, reference()), 1.0);
}

TEST(Allocation, CdfRejectsNonPositive)
{
    EXPECT_THROW(lognormal_cdf(0.0, reference()), std::domain_error);
    EXPECT_THROW(lognormal_cdf(-1.0, reference()), std::domain_error);
}

TEST(Allocation, LeafNodesFrozenValues)
{
    EXPECT_EQ(leaf_nodes(2000.0, reference()), 83); // ceil(0.7456... * 110)
    EXPECT_EQ(leaf_nodes(2.0, reference()), 1);
    EXPECT_EQ(leaf_nodes(1e12, reference()), 110);
    EXPECT_EQ(leaf_nodes(std::exp(6.94), {6.94, 1.0, 100}), 50);
    EXPECT_THROW(leaf_nodes(0.0, reference()), std::domain_error);
}

TEST(Allocation, LeafNodesMatchOracle)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> logfee(-2.0, 14.0);
    for (int i = 0; i < 5000; ++i) {
        const double fee = std::exp(logfee(rng));
        EXPECT_EQ(leaf_nodes(fee, reference()), oracle::leaf_nodes(fee, 6.94, 1.0, 110)) << fee;
    }
}

TEST(Allocation, MonotoneAndBounded)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> logfee(-10.0, 20.0);
    for (const AllocationParams p : {reference(), AllocationParams{5.32, 0.16, 10}, AllocationParams{9.7, 0.47, 759}}) {
        for (int i = 0; i < 10000; ++i) {
            double a = std::exp(logfee(rng)), b = std::exp(logfee(rng));
            if (a > b)
                std::swap(a, b);
            const auto na = leaf_nodes(a, p), nb = leaf_nodes(b, p);
            ASSERT_LE(na, nb);
            ASSERT_GE(na, 1);
            ASSERT_LE(nb, p.max_trx_nodes);
        }
    }
}

TEST(Allocation, LargerScaleNeverRaisesCdf)
{
    for (double fee : {1.0, 50.0, 1032.0, 1e5})
        for (double mu = 4.0; mu < 10.0; mu += 0.25)
            EXPECT_GE(lognormal_cdf(fee, {mu, 0.8, 1}), lognormal_cdf(fee, {mu + 0.25, 0.8, 1}));
}

TEST(Allocation, CapacityArithmetic)
{
    EXPECT_FALSE(fits(2090, 110, 2100));
    EXPECT_TRUE(fits(0, 2100, 2100));
    std::int64_t occupied = 0;
    int n = 0;
    while (fits(occupied, 110, 2100)) {
        occupied += 110;
        ++n;
    }
    EXPECT_EQ(n, 19);
    EXPECT_EQ(occupied, 2090);
}

TEST(Allocation, BlockIncentive)
{
    const std::vector<double> fees{make_transaction(1, 1000, 0).fee, make_transaction(2, 2000, 1).fee};
    EXPECT_DOUBLE_EQ(block_incentive(fees), 6.0);
    EXPECT_EQ(block_incentive(std::vector<double>{}), 0.0);
    EXPECT_THROW(block_incentive(std::vector<double>{1.0, -1.0}), std::domain_error);
}

TEST(Allocation, BlockIncentiveMatchesExtendedPrecisionSum)
{
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> fee(4.94, 1.0);
    std::vector<double> fees(400000);
    for (auto& f : fees)
        f = fee(rng);
    const double want = oracle::sum(fees);
    EXPECT_LE(std::abs(block_incentive(fees) - want), 1e-9 * want);
}
