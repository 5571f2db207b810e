#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dts/allocation.hpp"
#include "dts/core.hpp"

namespace dts {

/// Malformed input data; `what()` lists offending lines.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
            field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
            field.remove_suffix(1);
        out.push_back(field);
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s)
{
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Reads a transaction CSV: header row, columns id, amount,
/// arrival_time_ms and optional fee (derived from `commission_ratio` when absent).
inline std::vector<Transaction> read_transactions_csv(std::istream& in,
                                                      double commission_ratio = default_commission_ratio)
{
    std::string line;
    if (!std::getline(in, line))
        throw DataError("transaction csv: empty input");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
    const auto header = detail::split_csv(line);
    int col_id = -1, col_amount = -1, col_time = -1, col_fee = -1;
    for (int i = 0; i < int(header.size()); ++i) {
        if (header[i] == "id")
            col_id = i;
        else if (header[i] == "amount")
            col_amount = i;
        else if (header[i] == "arrival_time_ms")
            col_time = i;
        else if (header[i] == "fee")
            col_fee = i;
    }
    std::string missing;
    if (col_id < 0)
        missing += " id";
    if (col_amount < 0)
        missing += " amount";
    if (col_time < 0)
        missing += " arrival_time_ms";
    if (!missing.empty())
        throw DataError("transaction csv: missing column(s):" + missing);

    std::vector<Transaction> txs;
    std::vector<std::string> errors;
    std::int64_t line_no = 1;
    const std::size_t needed = std::size_t(std::max({col_id, col_amount, col_time, col_fee})) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto f = detail::split_csv(line);
        auto fail = [&](const std::string& why) { errors.push_back("line " + std::to_string(line_no) + ": " + why); };
        if (f.size() < needed) {
            fail("expected " + std::to_string(needed) + " fields");
            continue;
        }
        auto id = detail::parse_number<std::uint64_t>(f[std::size_t(col_id)]);
        auto amount = detail::parse_number<double>(f[std::size_t(col_amount)]);
        auto t = detail::parse_number<std::int64_t>(f[std::size_t(col_time)]);
        std::optional<double> fee;
        bool fee_present = col_fee >= 0 && !f[std::size_t(col_fee)].empty();
        if (fee_present)
            fee = detail::parse_number<double>(f[std::size_t(col_fee)]);
        if (!id || !amount || !t || (fee_present && !fee)) {
            fail("unparsable field");
            continue;
        }
        if (!(*amount >= 0.0) || *t < 0 || (fee && !(*fee >= 0.0))) {
            fail("negative or non-finite value");
            continue;
        }
        if (!txs.empty() && *t < txs.back().arrival_ms) {
            fail("arrival_time_ms decreases");
            continue;
        }
        Transaction tx = make_transaction(*id, *amount, *t, commission_ratio);
        if (fee)
            tx.fee = *fee;
        txs.push_back(tx);
    }
    if (!errors.empty()) {
        std::string msg = "transaction csv: " + std::to_string(errors.size()) + " malformed row(s)";
        for (std::size_t i = 0; i < errors.size() && i < 20; ++i)
            msg += "\n  " + errors[i];
        throw DataError(msg);
    }
    return txs;
}

inline std::vector<Transaction> load_csv(const std::string& path, double commission_ratio = default_commission_ratio)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path);
    return read_transactions_csv(in, commission_ratio);
}

inline void write_transactions_csv(std::ostream& os, std::span<const Transaction> txs)
{
    os << "id,amount,arrival_time_ms,fee\n";
    for (const auto& t : txs)
        os << t.id << ',' << detail::format_double(t.amount) << ',' << t.arrival_ms << ','
           << detail::format_double(t.fee) << '\n';
}

/// Synthetic stream parameters. Log-amounts are normal around
/// `amount_log_mean` plus a stationary AR(1) fee-level drift with standard
/// deviation `fee_drift_sd` and correlation length `fee_drift_corr` transactions.
struct DatasetSpec {
    std::int64_t count = 400000;
    double arrival_rate_tps = default_arrival_rate_tps;
    double amount_log_mean = 11.15; // median fee e^4.94 at 0.2%
    double amount_log_sd = 1.0;
    double fee_drift_sd = 0.4;
    double fee_drift_corr = 2000.0;
    double commission_ratio = default_commission_ratio;
    std::uint64_t seed = 2024;
};

inline std::vector<Transaction> generate(const DatasetSpec& spec)
{
    if (spec.count <= 0)
        throw std::invalid_argument("generate: count must be positive");
    if (!(spec.arrival_rate_tps > 0.0))
        throw std::invalid_argument("generate: arrival rate must be positive");
    if (!(spec.amount_log_sd >= 0.0) || !(spec.fee_drift_sd >= 0.0))
        throw std::invalid_argument("generate: standard deviations must be non-negative");
    if (spec.fee_drift_sd > 0.0 && !(spec.fee_drift_corr >= 1.0))
        throw std::invalid_argument("generate: drift correlation length must be at least 1");

    std::mt19937_64 rng(spec.seed);
    std::exponential_distribution<double> gap(spec.arrival_rate_tps / 1000.0); // per ms
    std::normal_distribution<double> normal(0.0, 1.0);

    const double phi = spec.fee_drift_sd > 0.0 ? 1.0 - 1.0 / spec.fee_drift_corr : 0.0;
    const double innovation = spec.fee_drift_sd * std::sqrt(1.0 - phi * phi);
    double drift = spec.fee_drift_sd * normal(rng);

    std::vector<Transaction> txs;
    txs.reserve(std::size_t(spec.count));
    double clock_ms = 0.0;
    for (std::int64_t i = 0; i < spec.count; ++i) {
        clock_ms += gap(rng);
        const double z = normal(rng);
        if (i > 0)
            drift = phi * drift + innovation * normal(rng);
        const double amount = std::exp(spec.amount_log_mean + spec.amount_log_sd * z + drift);
        txs.push_back(make_transaction(TxId(i + 1), amount, std::int64_t(std::floor(clock_ms)), spec.commission_ratio));
    }
    return txs;
}

struct IrrationalMix {
    double rational_fraction = 1.0;
    double overpaid_fraction = 0.0;
    double underpaid_fraction = 0.0;
    Interval over_multiplier{1.5, 3.0};
    Interval under_multiplier{0.1, 0.7};

    static IrrationalMix mixed_population() { return {0.70, 0.15, 0.15, {1.5, 3.0}, {0.1, 0.7}}; }
};

struct InjectionResult {
    std::vector<Transaction> stream;
    std::int64_t overpaid = 0;
    std::int64_t underpaid = 0;
    std::int64_t clamped_zero_fees = 0;
};

/// Rescales the fees of a seeded random subset of users; amounts, ids and order are kept.
inline InjectionResult inject_irrational(std::span<const Transaction> stream, const IrrationalMix& mix,
                                         std::uint64_t seed)
{
    const double total = mix.rational_fraction + mix.overpaid_fraction + mix.underpaid_fraction;
    if (mix.rational_fraction < 0 || mix.overpaid_fraction < 0 || mix.underpaid_fraction < 0 ||
        std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("inject_irrational: fractions must be non-negative and sum to 1");
    if (mix.over_multiplier.lo > mix.over_multiplier.hi || mix.under_multiplier.lo > mix.under_multiplier.hi ||
        mix.under_multiplier.lo < 0.0)
        throw std::invalid_argument("inject_irrational: bad multiplier range");

    InjectionResult res;
    res.stream.assign(stream.begin(), stream.end());
    const std::size_t n = stream.size();
    const auto n_over = std::size_t(std::llround(mix.overpaid_fraction * double(n)));
    const auto n_under = std::min(n - n_over, std::size_t(std::llround(mix.underpaid_fraction * double(n))));
    if (n_over + n_under == 0)
        return res;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> over(mix.over_multiplier.lo, mix.over_multiplier.hi);
    std::uniform_real_distribution<double> under(mix.under_multiplier.lo, mix.under_multiplier.hi);

    for (std::size_t j = 0; j < n_over; ++j)
        res.stream[idx[j]].fee *= over(rng);
    for (std::size_t j = n_over; j < n_over + n_under; ++j) {
        auto& tx = res.stream[idx[j]];
        tx.fee *= under(rng);
        if (tx.fee <= 0.0 && stream[idx[j]].fee > 0.0) {
            tx.fee = min_positive_fee;
            ++res.clamped_zero_fees;
        }
    }
    res.overpaid = std::int64_t(n_over);
    res.underpaid = std::int64_t(n_under);
    return res;
}

} // namespace dts
