#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dts/core.hpp"
#include "dts/numeric.hpp"

namespace dts::vrp {

/// Transactions as customers (fee c_i, demand in leaf nodes) and blocks as
/// vehicles of equal capacity.
struct Instance {
    std::vector<double> fees;
    std::vector<std::int64_t> demands;
    std::int64_t capacity = default_leaf_capacity;

    std::size_t size() const { return fees.size(); }
};

/// x[i][k] in {0,1}: transaction i packed into block k.
class AssignmentMatrix {
public:
    AssignmentMatrix() = default;
    AssignmentMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), x_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint8_t& at(std::size_t i, std::size_t k) { return x_.at(i * cols_ + k); }
    std::uint8_t at(std::size_t i, std::size_t k) const { return x_.at(i * cols_ + k); }

    /// Builds a matrix from one block index per row.
    static AssignmentMatrix from_labels(std::span<const std::size_t> labels, std::size_t cols)
    {
        AssignmentMatrix m(labels.size(), cols);
        for (std::size_t i = 0; i < labels.size(); ++i)
            m.at(i, labels[i]) = 1;
        return m;
    }

    friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> x_;
};

struct Encoded {
    AssignmentMatrix matrix;
    Instance instance;
    std::vector<TxId> tx_ids; // row order
};

/// Rows are the included transactions in block order; columns are blocks.
/// Demands are the recorded leaf-node counts.
inline Encoded encode(std::span<const BlockRecord> blocks, std::span<const Transaction> universe,
                      std::int64_t capacity = default_leaf_capacity)
{
    std::unordered_map<TxId, double> fee_of;
    fee_of.reserve(universe.size());
    for (const auto& t : universe)
        fee_of.emplace(t.id, t.fee);

    Encoded e;
    e.instance.capacity = capacity;
    std::vector<std::size_t> labels;
    std::unordered_map<TxId, std::int64_t> seen;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        if (b.tx_nodes.size() != b.tx_ids.size())
            throw std::invalid_argument("vrp::encode: block " + std::to_string(b.height) + " has mismatched node list");
        for (std::size_t j = 0; j < b.tx_ids.size(); ++j) {
            const TxId id = b.tx_ids[j];
            if (auto [it, fresh] = seen.emplace(id, b.height); !fresh)
                throw std::invalid_argument("vrp::encode: transaction " + std::to_string(id) + " packed in blocks " +
                                            std::to_string(it->second) + " and " + std::to_string(b.height));
            auto f = fee_of.find(id);
            if (f == fee_of.end())
                throw std::invalid_argument("vrp::encode: transaction " + std::to_string(id) + " not in universe");
            e.tx_ids.push_back(id);
            e.instance.fees.push_back(f->second);
            e.instance.demands.push_back(b.tx_nodes[j]);
            labels.push_back(k);
        }
    }
    e.matrix = AssignmentMatrix::from_labels(labels, blocks.size());
    return e;
}

struct Violation {
    enum class Kind { row_sum, capacity, shape };
    Kind kind;
    std::size_t index; // row for row_sum, column for capacity
    std::string message;
};

/// Every row sums to one and every block's demand fits the capacity.
inline std::vector<Violation> check_constraints(const AssignmentMatrix& m, const Instance& inst)
{
    std::vector<Violation> v;
    if (m.rows() != inst.size() || inst.demands.size() != inst.fees.size()) {
        v.push_back({Violation::Kind::shape, 0,
                     "matrix has " + std::to_string(m.rows()) + " rows for " + std::to_string(inst.size()) +
                         " transactions"});
        return v;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        int sum = 0;
        for (std::size_t k = 0; k < m.cols(); ++k)
            sum += m.at(i, k);
        if (sum != 1)
            v.push_back({Violation::Kind::row_sum, i,
                         "transaction row " + std::to_string(i) + " packed " + std::to_string(sum) + " times"});
    }
    for (std::size_t k = 0; k < m.cols(); ++k) {
        std::int64_t demand = 0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (m.at(i, k))
                demand += inst.demands[i];
        if (demand > inst.capacity)
            v.push_back({Violation::Kind::capacity, k,
                         "block " + std::to_string(k) + " demand " + std::to_string(demand) + "/" +
                             std::to_string(inst.capacity)});
    }
    return v;
}

inline std::vector<double> block_incentives(const AssignmentMatrix& m, std::span<const double> fees)
{
    if (fees.size() != m.rows())
        throw std::invalid_argument("vrp: fee count does not match matrix rows");
    std::vector<CompensatedSum> sums(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k)
            if (m.at(i, k))
                sums[k] += fees[i];
    std::vector<double> out;
    out.reserve(sums.size());
    for (const auto& s : sums)
        out.push_back(s.value());
    return out;
}

/// Population variance (divide by block count) of per-block incentive sums.
inline double population_variance(std::span<const double> xs)
{
    if (xs.empty())
        throw std::invalid_argument("vrp: variance needs at least one block");
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= double(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return ss / double(xs.size());
}

inline double variance_objective(const AssignmentMatrix& m, std::span<const double> fees)
{
    if (m.cols() == 0)
        throw std::invalid_argument("vrp::variance_objective: need at least one block");
    return population_variance(block_incentives(m, fees));
}

inline constexpr std::size_t oracle_max_transactions = 12;
inline constexpr std::size_t oracle_max_blocks = 3;

struct OracleResult {
    AssignmentMatrix witness;
    double variance = 0.0;
    std::uint64_t feasible_assignments = 0;
};

/// Exhaustive minimum-variance assignment. Blocks may be left empty.
/// Assignments are visited in lexicographic order of block labels and the
/// first strict minimum is kept, so the witness is deterministic.
inline OracleResult brute_force_min_variance(const Instance& inst, std::size_t block_count,
                                             std::size_t max_n = oracle_max_transactions)
{
    const std::size_t n = inst.size();
    if (inst.demands.size() != n)
        throw std::invalid_argument("vrp oracle: fees and demands differ in length");
    if (n == 0)
        throw std::invalid_argument("vrp oracle: empty instance");
    if (block_count < 1 || block_count > oracle_max_blocks)
        throw std::invalid_argument("vrp oracle: block count must be in 1.." + std::to_string(oracle_max_blocks));
    if (max_n > oracle_max_transactions || n > max_n)
        throw std::invalid_argument("vrp oracle: instance too large (" + std::to_string(n) + " > " +
                                    std::to_string(std::min(max_n, oracle_max_transactions)) + ")");
    for (std::size_t i = 0; i < n; ++i)
        if (inst.demands[i] > inst.capacity || inst.demands[i] < 0)
            throw std::invalid_argument("vrp oracle: demand of transaction " + std::to_string(i) +
                                        " exceeds capacity");

    std::vector<std::size_t> label(n, 0), best_label;
    std::vector<std::int64_t> load(block_count, 0);
    std::vector<double> income(block_count, 0.0);
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t feasible = 0;

    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            ++feasible;
            const double var = population_variance(income);
            if (var < best) {
                best = var;
                best_label = label;
            }
            return;
        }
        for (std::size_t k = 0; k < block_count; ++k) {
            if (load[k] + inst.demands[i] > inst.capacity)
                continue;
            label[i] = k;
            load[k] += inst.demands[i];
            const double before = income[k];
            income[k] += inst.fees[i];
            self(self, i + 1);
            income[k] = before;
            load[k] -= inst.demands[i];
        }
    };
    rec(rec, 0);

    if (best_label.empty())
        throw std::invalid_argument("vrp oracle: no feasible assignment into " + std::to_string(block_count) +
                                    " blocks");
    return {AssignmentMatrix::from_labels(best_label, block_count), best, feasible};
}

/// Per-block deviation from a reference incentive level (reporting only).
struct TargetReport {
    double target = 0.0;
    std::vector<double> deviations;
    double rms_deviation = 0.0;
    double max_abs_deviation = 0.0;
};

inline TargetReport target_deviation(const AssignmentMatrix& m, std::span<const double> fees, double target)
{
    TargetReport r;
    r.target = target;
    double ss = 0.0;
    for (double inc : block_incentives(m, fees)) {
        const double d = inc - target;
        r.deviations.push_back(d);
        ss += d * d;
        r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(d));
    }
    if (!r.deviations.empty())
        r.rms_deviation = std::sqrt(ss / double(r.deviations.size()));
    return r;
}

} // namespace dts::vrp
