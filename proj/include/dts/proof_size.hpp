#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dts {

inline constexpr double hash_bytes = 256.0 / 8.0;

// How a fractional tree depth becomes a level count:
//   ceil   - whole levels needed to reach n leaves
//   smooth - the fractional log itself
//   floor  - whole levels strictly below the fractional depth
enum class DepthRounding { ceil, smooth, floor };

inline std::string_view to_string(DepthRounding m)
{
    switch (m) {
    case DepthRounding::ceil:
        return "ceil";
    case DepthRounding::smooth:
        return "smooth";
    case DepthRounding::floor:
        return "floor";
    }
    return "?";
}

inline DepthRounding parse_depth_rounding(std::string_view s)
{
    if (s == "ceil")
        return DepthRounding::ceil;
    if (s == "smooth")
        return DepthRounding::smooth;
    if (s == "floor")
        return DepthRounding::floor;
    throw std::invalid_argument("unknown rounding mode: " + std::string(s));
}

/// log_k(n) rounded per `mode`. Integer modes are computed exactly.
inline double proof_levels(std::int64_t n, std::int64_t k, DepthRounding mode)
{
    if (n < 2)
        throw std::invalid_argument("proof size: need at least 2 transactions");
    if (k < 2)
        throw std::invalid_argument("proof size: branching factor must be at least 2");
    if (mode == DepthRounding::smooth)
        return std::log(double(n)) / std::log(double(k));
    // largest e with k^e <= n
    std::int64_t e = 0;
    std::int64_t p = 1;
    while (p <= n / k) {
        p *= k;
        ++e;
    }
    if (mode == DepthRounding::floor)
        return double(e);
    return double(p == n ? e : e + 1);
}

inline double merkle_proof_size_bytes(std::int64_t n_t, DepthRounding mode)
{
    return proof_levels(n_t, 2, mode) * hash_bytes;
}

inline double verkle_proof_size_bytes(std::int64_t n_t, std::int64_t k, DepthRounding mode)
{
    return proof_levels(n_t, k, mode) * hash_bytes;
}

struct Scenario {
    std::string name;
    std::int64_t n_t = 0;
};

inline std::vector<Scenario> default_scenarios()
{
    return {{"Bitcoin", 2100}, {"XThin", 130999}, {"Compact", 174747}, {"Graphene", 413507}, {"Graphene-DTS", 540000}};
}

struct BandwidthRow {
    std::string scenario;
    std::int64_t n_t = 0;
    std::string structure; // "merkle" | "verkle"
    std::int64_t k = 2;
    DepthRounding mode = DepthRounding::smooth;
    double bytes = 0.0;
};

inline std::vector<BandwidthRow> bandwidth_report(std::span<const Scenario> scenarios, std::span<const std::int64_t> ks,
                                                  std::span<const DepthRounding> modes)
{
    std::vector<BandwidthRow> rows;
    for (const auto& s : scenarios) {
        for (auto m : modes) {
            rows.push_back({s.name, s.n_t, "merkle", 2, m, merkle_proof_size_bytes(s.n_t, m)});
            for (auto k : ks)
                rows.push_back({s.name, s.n_t, "verkle", k, m, verkle_proof_size_bytes(s.n_t, k, m)});
        }
    }
    return rows;
}

inline void write_bandwidth_csv(std::ostream& os, std::span<const BandwidthRow> rows)
{
    os << "scenario,n_t,structure,k,mode,bytes\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f", r.bytes);
        os << r.scenario << ',' << r.n_t << ',' << r.structure << ',' << r.k << ',' << to_string(r.mode) << ','
           << buf << '\n';
    }
}

// Published proof-size cells (bytes). k == 2 rows are Merkle sizes.
struct PublishedCell {
    std::string scenario;
    std::int64_t n_t = 0;
    std::int64_t k = 2;
    double bytes = 0.0;
};

inline std::vector<PublishedCell> published_proof_sizes()
{
    return {
        {"Bitcoin", 2100, 2, 365.57},    {"XThin", 130999, 2, 543.97},    {"Compact", 174747, 2, 557.28},
        {"Graphene", 413507, 2, 597.04}, {"Bitcoin", 2100, 3, 222.82},    {"Bitcoin", 2100, 5, 152.10},
        {"Bitcoin", 2100, 10, 106.31},   {"XThin", 130999, 3, 343.21},    {"XThin", 130999, 5, 218.33},
        {"XThin", 130999, 10, 163.75},   {"Compact", 174747, 3, 351.60},  {"Compact", 174747, 5, 240.01},
        {"Compact", 174747, 10, 167.76}, {"Graphene", 413507, 3, 376.69}, {"Graphene", 413507, 5, 257.13},
        {"Graphene", 413507, 10, 179.73},
    };
}

struct CellCheck {
    PublishedCell cell;
    double computed = 0.0;
    bool consistent = false;
};

/// Recomputes each published cell in smooth mode and flags the ones that disagree.
inline std::vector<CellCheck> check_published_cells(std::span<const PublishedCell> cells, double tolerance = 0.02)
{
    std::vector<CellCheck> out;
    for (const auto& c : cells) {
        const double v = verkle_proof_size_bytes(c.n_t, c.k, DepthRounding::smooth);
        out.push_back({c, v, std::abs(v - c.bytes) <= tolerance});
    }
    return out;
}

} // namespace dts
