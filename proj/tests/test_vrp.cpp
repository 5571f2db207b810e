#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "dts/ingest.hpp"
#include "dts/simulator.hpp"
#include "dts/vrp.hpp"

using namespace dts;
using namespace dts::vrp;

namespace {

// Independent reference: enumerate all block_count^n labelings directly.
double enumerate_min_variance(const Instance& inst, std::size_t blocks)
{
    const std::size_t n = inst.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i)
        total *= blocks;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<double> inc(blocks, 0.0);
        std::vector<std::int64_t> load(blocks, 0);
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i) {
            inc[c % blocks] += inst.fees[i];
            load[c % blocks] += inst.demands[i];
            c /= blocks;
        }
        if (std::any_of(load.begin(), load.end(), [&](auto l) { return l > inst.capacity; }))
            continue;
        double mean = 0.0;
        for (double v : inc)
            mean += v / double(blocks);
        double ss = 0.0;
        for (double v : inc)
            ss += (v - mean) * (v - mean);
        best = std::min(best, ss / double(blocks));
    }
    return best;
}

} // namespace

TEST(Vrp, SingleTransaction)
{
    const Instance inst{{7.0}, {3}, 2100};
    const auto r = brute_force_min_variance(inst, 1);
    EXPECT_EQ(r.witness, AssignmentMatrix::from_labels(std::vector<std::size_t>{0}, 1));
    EXPECT_EQ(r.witness.at(0, 0), 1);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_EQ(r.feasible_assignments, 1u);
}

TEST(Vrp, DoublePackedRowIsViolation)
{
    AssignmentMatrix m(2, 2);
    m.at(0, 0) = 1;
    m.at(0, 1) = 1;
    m.at(1, 1) = 1;
    const Instance inst{{1.0, 2.0}, {1, 1}, 2100};
    const auto v = check_constraints(m, inst);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::row_sum);
    EXPECT_EQ(v[0].index, 0u);
}

TEST(Vrp, UnpackedRowIsViolation)
{
    AssignmentMatrix m(2, 1);
    m.at(0, 0) = 1;
    const auto v = check_constraints(m, Instance{{1.0, 2.0}, {1, 1}, 2100});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].index, 1u);
}

TEST(Vrp, CapacityViolation)
{
    const Instance inst{{1.0}, {2101}, 2100};
    const auto v = check_constraints(AssignmentMatrix::from_labels(std::vector<std::size_t>{0}, 1), inst);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::capacity);
    EXPECT_THROW(brute_force_min_variance(inst, 1), std::invalid_argument);
}

TEST(Vrp, ShapeMismatch)
{
    const auto v = check_constraints(AssignmentMatrix(3, 1), Instance{{1.0}, {1}, 2100});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::shape);
}

TEST(Vrp, PopulationVariance)
{
    EXPECT_DOUBLE_EQ(population_variance(std::vector<double>{4.0, 6.0}), 1.0);
    EXPECT_EQ(population_variance(std::vector<double>{3.0}), 0.0);
    EXPECT_THROW(population_variance(std::vector<double>{}), std::invalid_argument);
}

TEST(Vrp, EqualFeesBalancePerfectly)
{
    const Instance inst{{5, 5, 5, 5}, {1, 1, 1, 1}, 2100};
    const auto r = brute_force_min_variance(inst, 2);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_TRUE(check_constraints(r.witness, inst).empty());
    EXPECT_EQ(r.feasible_assignments, 16u);
}

TEST(Vrp, InfeasibleInstance)
{
    const Instance inst{{1, 1, 1}, {2, 2, 2}, 3};
    EXPECT_THROW(brute_force_min_variance(inst, 2), std::invalid_argument);
}

TEST(Vrp, SizeLimits)
{
    const Instance big{std::vector<double>(13, 1.0), std::vector<std::int64_t>(13, 1), 2100};
    EXPECT_THROW(brute_force_min_variance(big, 2), std::invalid_argument);
    const Instance ok{{1.0}, {1}, 2100};
    EXPECT_THROW(brute_force_min_variance(ok, 4), std::invalid_argument);
    EXPECT_THROW(brute_force_min_variance(ok, 0), std::invalid_argument);
    EXPECT_THROW(brute_force_min_variance(ok, 1, 13), std::invalid_argument);
}

TEST(Vrp, OracleAgreesWithDirectEnumeration)
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t k = 1 + rng() % 3;
        Instance inst;
        inst.capacity = 10;
        for (std::size_t i = 0; i < n; ++i) {
            inst.fees.push_back(double(1 + rng() % 50) / 4.0);
            inst.demands.push_back(std::int64_t(1 + rng() % 6));
        }
        const double want = enumerate_min_variance(inst, k);
        if (std::isinf(want)) {
            EXPECT_THROW(brute_force_min_variance(inst, k), std::invalid_argument);
            continue;
        }
        const auto r = brute_force_min_variance(inst, k);
        EXPECT_NEAR(r.variance, want, 1e-9);
        EXPECT_TRUE(check_constraints(r.witness, inst).empty());
        EXPECT_NEAR(variance_objective(r.witness, inst.fees), r.variance, 1e-9);
    }
}

TEST(Vrp, ColumnPermutationInvariance)
{
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 6, k = 3;
        std::vector<double> fees;
        std::vector<std::size_t> labels;
        for (std::size_t i = 0; i < n; ++i) {
            fees.push_back(double(rng() % 100));
            labels.push_back(rng() % k);
        }
        const auto m = AssignmentMatrix::from_labels(labels, k);
        std::vector<std::size_t> perm{2, 0, 1};
        std::vector<std::size_t> permuted;
        for (auto l : labels)
            permuted.push_back(perm[l]);
        EXPECT_NEAR(variance_objective(m, fees),
                    variance_objective(AssignmentMatrix::from_labels(permuted, k), fees), 1e-9);
    }
}

TEST(Vrp, EncodeSimulatorOutput)
{
    DatasetSpec spec;
    spec.count = 20000;
    const auto txs = generate(spec);
    DtsStrategy s;
    s.mempool_size = 500;
    s.max_trx_nodes = 110;
    s.scale = 6.94;
    s.shape = 1.0;
    SimulationConfig cfg;
    cfg.block_interval_ms = 0;
    cfg.build_trees = false;
    const auto r = run(txs, s, cfg);
    ASSERT_GT(r.blocks.size(), 3u);
    const auto e = encode(r.blocks, txs);
    EXPECT_TRUE(check_constraints(e.matrix, e.instance).empty());
    const auto inc = block_incentives(e.matrix, e.instance.fees);
    for (std::size_t k = 0; k < r.blocks.size(); ++k)
        EXPECT_NEAR(inc[k], r.blocks[k].incentive, 1e-9 * r.blocks[k].incentive);

    auto dup = r.blocks;
    dup[1].tx_ids.push_back(dup[0].tx_ids.front());
    dup[1].tx_nodes.push_back(dup[0].tx_nodes.front());
    EXPECT_THROW(encode(dup, txs), std::invalid_argument);
    auto stranger = r.blocks;
    stranger[0].tx_ids[0] = 99999999;
    EXPECT_THROW(encode(stranger, txs), std::invalid_argument);
}

TEST(Vrp, OracleDominatesSimulatorOnSmallInstances)
{
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int rep = 0; rep < 200 && checked < 25; ++rep) {
        std::vector<Transaction> txs;
        const std::size_t n = 2 + rng() % 9;
        for (std::size_t i = 0; i < n; ++i)
            txs.push_back(make_transaction(i + 1, double(200 + rng() % 200000), std::int64_t(i)));
        DtsStrategy s;
        s.mempool_size = 1;
        s.max_trx_nodes = 8;
        s.scale = 5.5;
        s.shape = 1.0;
        SimulationConfig cfg;
        cfg.block_interval_ms = 0;
        cfg.flush_tail = true;
        cfg.build_trees = false;
        cfg.leaf_capacity = 16;
        const auto r = run(txs, s, cfg);
        if (r.blocks.size() < 1 || r.blocks.size() > oracle_max_blocks)
            continue;
        const auto e = encode(r.blocks, txs, cfg.leaf_capacity);
        ASSERT_EQ(e.instance.size(), n);
        const auto o = brute_force_min_variance(e.instance, r.blocks.size());
        EXPECT_LE(o.variance, variance_objective(e.matrix, e.instance.fees) + 1e-9);
        ++checked;
    }
    EXPECT_GE(checked, 10);
}

TEST(Vrp, TargetDeviation)
{
    const auto m = AssignmentMatrix::from_labels(std::vector<std::size_t>{0, 1, 1}, 2);
    const auto t = target_deviation(m, std::vector<double>{4.0, 3.0, 5.0}, 6.0);
    ASSERT_EQ(t.deviations.size(), 2u);
    EXPECT_DOUBLE_EQ(t.deviations[0], -2.0);
    EXPECT_DOUBLE_EQ(t.deviations[1], 2.0);
    EXPECT_DOUBLE_EQ(t.rms_deviation, 2.0);
    EXPECT_DOUBLE_EQ(t.max_abs_deviation, 2.0);
}
