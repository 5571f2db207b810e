#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dts/digest.hpp"

namespace dts {

// A vector commitment over an ordered list of child digests, with
// single-position openings.
template <typename S>
concept CommitmentScheme = requires(const S& s, std::span<const Digest> children, std::size_t pos,
                                    const Digest& d, const typename S::opening_type& o) {
    typename S::opening_type;
    { s.commit(children) } -> std::same_as<Digest>;
    { s.open(children, pos) } -> std::same_as<typename S::opening_type>;
    { s.verify(d, pos, d, o) } -> std::same_as<bool>;
};

/// Hash-based stand-in for a vector commitment. The commitment is
/// SHA-256 over a domain tag, the child count and the ordered children;
/// an opening carries every other child, so it is not constant-size.
struct DigestCommitment {
    struct opening_type {
        std::uint32_t width = 0;
        std::vector<Digest> others;

        friend bool operator==(const opening_type&, const opening_type&) = default;
    };

    Digest commit(std::span<const Digest> children) const
    {
        Sha256 h;
        h.update(std::string_view("\x01", 1)).update_u64(children.size());
        for (const auto& c : children)
            h.update(c);
        return h.finish();
    }

    opening_type open(std::span<const Digest> children, std::size_t pos) const
    {
        if (pos >= children.size())
            throw std::out_of_range("DigestCommitment::open: position out of range");
        opening_type o;
        o.width = static_cast<std::uint32_t>(children.size());
        o.others.reserve(children.size() - 1);
        for (std::size_t i = 0; i < children.size(); ++i)
            if (i != pos)
                o.others.push_back(children[i]);
        return o;
    }

    bool verify(const Digest& commitment, std::size_t pos, const Digest& child, const opening_type& o) const
    {
        if (o.width == 0 || pos >= o.width || o.others.size() + 1 != o.width)
            return false;
        std::vector<Digest> children;
        children.reserve(o.width);
        children.insert(children.end(), o.others.begin(), o.others.begin() + std::ptrdiff_t(pos));
        children.push_back(child);
        children.insert(children.end(), o.others.begin() + std::ptrdiff_t(pos), o.others.end());
        return commit(children) == commitment;
    }
};

static_assert(CommitmentScheme<DigestCommitment>);

/// Digest of one leaf slot; `slot` indexes the nodes a transaction occupies.
inline Digest leaf_digest(std::uint64_t tx_id, std::uint64_t slot, double fee)
{
    return Sha256{}.update(std::string_view("\x00", 1)).update_u64(tx_id).update_u64(slot).update_f64(fee).finish();
}

/// Number of commitment layers above `n` leaves; 1 for a single leaf.
inline std::size_t tree_depth(std::size_t n, std::size_t k)
{
    if (n == 0 || k < 2)
        throw std::invalid_argument("tree_depth: need n >= 1 and k >= 2");
    std::size_t depth = 0;
    std::size_t width = n;
    do {
        width = (width + k - 1) / k;
        ++depth;
    } while (width > 1);
    return depth;
}

template <CommitmentScheme Scheme = DigestCommitment>
class VerkleTree {
public:
    using opening_type = typename Scheme::opening_type;

    struct PathStep {
        std::size_t level = 0;          // 1 = commitments directly over leaves
        std::size_t child_position = 0; // position of the child inside its group
        Digest commitment{};            // the group's commitment at this level
        opening_type opening;

        friend bool operator==(const PathStep&, const PathStep&) = default;
    };

    struct Proof {
        std::size_t leaf_index = 0;
        std::vector<PathStep> path;
    };

    VerkleTree(std::vector<Digest> leaves, std::size_t branching_factor, Scheme scheme = {})
        : k_(branching_factor), scheme_(std::move(scheme))
    {
        if (k_ < 2)
            throw std::invalid_argument("VerkleTree: branching factor must be at least 2");
        if (leaves.empty())
            throw std::invalid_argument("VerkleTree: no leaves");
        levels_.push_back(std::move(leaves));
        do {
            const auto& below = levels_.back();
            std::vector<Digest> above;
            above.reserve((below.size() + k_ - 1) / k_);
            for (std::size_t i = 0; i < below.size(); i += k_) {
                const std::size_t n = std::min(k_, below.size() - i);
                above.push_back(scheme_.commit(std::span<const Digest>(below).subspan(i, n)));
            }
            levels_.push_back(std::move(above));
        } while (levels_.back().size() > 1);
    }

    std::size_t branching_factor() const { return k_; }
    std::size_t leaf_count() const { return levels_.front().size(); }
    std::size_t depth() const { return levels_.size() - 1; }
    const Digest& root() const { return levels_.back().front(); }
    const std::vector<Digest>& leaves() const { return levels_.front(); }
    const std::vector<std::vector<Digest>>& levels() const { return levels_; }
    const Scheme& scheme() const { return scheme_; }

    Proof prove(std::size_t leaf_index) const
    {
        if (leaf_index >= leaf_count())
            throw std::out_of_range("VerkleTree::prove: leaf index out of range");
        Proof p;
        p.leaf_index = leaf_index;
        std::size_t idx = leaf_index;
        for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
            const auto& row = levels_[lvl];
            const std::size_t start = (idx / k_) * k_;
            const std::size_t n = std::min(k_, row.size() - start);
            auto group = std::span<const Digest>(row).subspan(start, n);
            p.path.push_back({lvl + 1, idx - start, levels_[lvl + 1][idx / k_], scheme_.open(group, idx - start)});
            idx /= k_;
        }
        return p;
    }

private:
    std::size_t k_;
    Scheme scheme_;
    std::vector<std::vector<Digest>> levels_; // levels_[0] = leaves, back() = {root}
};

template <CommitmentScheme Scheme = DigestCommitment>
VerkleTree<Scheme> build_tree(std::vector<Digest> leaves, std::size_t k, Scheme scheme = {})
{
    return VerkleTree<Scheme>(std::move(leaves), k, std::move(scheme));
}

/// True iff walking the proof from `leaf` reproduces `root`.
template <CommitmentScheme Scheme = DigestCommitment>
bool verify(const Digest& root, const typename VerkleTree<Scheme>::Proof& proof, const Digest& leaf,
            const Scheme& scheme = {})
{
    if (proof.path.empty())
        return false;
    Digest acc = leaf;
    for (std::size_t i = 0; i < proof.path.size(); ++i) {
        const auto& step = proof.path[i];
        if (step.level != i + 1)
            return false;
        if (!scheme.verify(step.commitment, step.child_position, acc, step.opening))
            return false;
        acc = step.commitment;
    }
    return acc == root;
}

} // namespace dts
