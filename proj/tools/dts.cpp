// dts: command-line front end for the DTS simulator, optimizers and analytics.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dts/config.hpp"
#include "dts/core.hpp"
#include "dts/digest.hpp"
#include "dts/ingest.hpp"
#include "dts/metrics.hpp"
#include "dts/optimize.hpp"
#include "dts/proof_size.hpp"
#include "dts/simulator.hpp"
#include "dts/version.hpp"
#include "dts/vrp.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_data = 3;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
};

struct DataFlags {
    std::string data_path;
    std::optional<std::int64_t> count;
    bool irrational = false;
};

struct StrategyFlags {
    std::optional<int> category;
    std::optional<std::int64_t> a1, a5, a6;
    std::optional<double> a4, a7, a8;
    std::optional<std::int64_t> interval_ms;
    bool flush = false;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// defaults (with seed env override) < config file < flags
dts::RunConfig resolve(const Common& c, const DataFlags* d, const StrategyFlags* s)
{
    dts::RunConfig cfg = dts::default_config();
    if (!c.config_path.empty())
        cfg = dts::load_ini(c.config_path, cfg);
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.jobs)
        cfg.optimizer.jobs = *c.jobs;
    if (d && d->count)
        cfg.sim.transaction_budget = *d->count;
    if (s) {
        if (s->category)
            cfg.category = *s->category;
        auto& a = cfg.attributes;
        if (s->a1)
            a.mempool_size = *s->a1;
        if (s->a4)
            a.small_fee_threshold = *s->a4;
        if (s->a5)
            a.small_fee_count = *s->a5;
        if (s->a6)
            a.max_trx_nodes = *s->a6;
        if (s->a7)
            a.scale = *s->a7;
        if (s->a8)
            a.shape = *s->a8;
        if (s->interval_ms)
            cfg.sim.block_interval_ms = *s->interval_ms;
        if (s->flush)
            cfg.sim.flush_tail = true;
    }
    cfg.propagate_seed();
    if (cfg.sim.transaction_budget <= 0)
        throw dts::ConfigError("transaction count must be positive");
    return cfg;
}

std::vector<dts::Transaction> acquire_dataset(const dts::RunConfig& cfg, const DataFlags& d,
                                              std::int64_t* clamped = nullptr)
{
    std::vector<dts::Transaction> txs;
    if (!d.data_path.empty()) {
        if (!fs::exists(d.data_path))
            throw dts::DataError("dataset not found: " + d.data_path);
        txs = dts::load_csv(d.data_path, cfg.sim.commission_ratio);
        if (txs.empty())
            throw dts::DataError("dataset has no transactions: " + d.data_path);
    } else {
        txs = dts::generate(cfg.dataset);
    }
    if (d.irrational) {
        auto mix = cfg.irrational;
        if (mix.rational_fraction == 1.0)
            mix = dts::IrrationalMix::mixed_population();
        auto r = dts::inject_irrational(txs, mix, cfg.seed);
        if (r.clamped_zero_fees > 0)
            std::cerr << "warning: " << r.clamped_zero_fees << " zero fees clamped to the minimum positive fee\n";
        if (clamped)
            *clamped = r.clamped_zero_fees;
        txs = std::move(r.stream);
    }
    return txs;
}

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json manifest_base(const std::string& command, const std::vector<std::string>& argv, const Common& c,
                   const dts::RunConfig& cfg)
{
    const std::string ini = dts::to_ini(cfg);
    json m;
    m["command"] = command;
    m["argv"] = argv;
    m["version"] = dts::version;
    m["seed"] = cfg.seed;
    m["config_digest"] = dts::to_hex(dts::sha256(ini));
    m["config"] = ini;
    if (!c.config_path.empty()) {
        m["config_file"] = c.config_path;
        m["config_file_text"] = read_file(c.config_path);
    }
    return m;
}

void write_manifest(const fs::path& dir, json m, const std::vector<std::string>& outputs, double wall_s)
{
    m["outputs"] = outputs;
    m["wall_time_s"] = wall_s;
    std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
}

void add_data_flags(CLI::App* app, DataFlags& d)
{
    app->add_option("--data", d.data_path, "Transaction CSV (id,amount,arrival_time_ms[,fee]); synthetic if omitted");
    app->add_option("--count", d.count, "Synthetic transaction count");
    app->add_flag("--irrational", d.irrational, "Perturb fees with the configured irrational-user mix (70/15/15 by default)");
}

void add_strategy_flags(CLI::App* app, StrategyFlags& s)
{
    app->add_option("--category", s.category, "Strategy category 1..4")->check(CLI::Range(1, 4));
    app->add_option("--A1", s.a1, "Mempool size");
    app->add_option("--A4", s.a4, "Small-fee threshold (categories 1, 3)");
    app->add_option("--A5", s.a5, "Small-fee slots per block (categories 1, 3)");
    app->add_option("--A6", s.a6, "Maximum leaf nodes per transaction");
    app->add_option("--A7", s.a7, "Scale (mu)");
    app->add_option("--A8", s.a8, "Shape (sigma)");
    app->add_option("--interval-ms", s.interval_ms, "Block slot spacing in ms; 0 pulls whenever the mempool is full");
    app->add_flag("--flush", s.flush, "Seal the unfinished tail block at end of stream");
}

int cmd_simulate(const Common& c, const DataFlags& d, const StrategyFlags& s, const std::string& out,
                 const std::vector<std::string>& argv)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = resolve(c, &d, &s);
    dts::DtsStrategy strategy;
    try {
        strategy = cfg.strategy();
    } catch (const std::invalid_argument& e) {
        throw dts::ConfigError(e.what());
    }
    if (auto v = dts::validate_strategy(strategy, cfg.sim); !v.empty())
        throw dts::ConfigError("invalid strategy: " + v.front());

    const auto txs = acquire_dataset(cfg, d);
    const auto res = dts::run(txs, strategy, cfg.sim);

    fs::create_directories(out);
    const fs::path dir(out);
    {
        std::ofstream os(dir / "blocks.csv");
        dts::write_blocks_csv(os, res.blocks);
    }
    {
        std::ofstream os(dir / "assignments.csv");
        dts::write_assignment_csv(os, res.blocks, txs);
    }
    const auto series = dts::incentive_series(res.blocks);
    if (series.excluded_zero > 0)
        std::cerr << "warning: " << series.excluded_zero << " zero-incentive blocks excluded from volatility\n";
    const double vol = dts::block_volatility(res.blocks);
    const std::string cls = std::isnan(vol) ? "undefined" : std::string(dts::to_string(dts::benchmark_check(vol)));
    {
        const auto& st = res.stats;
        std::ofstream os(dir / "summary.csv");
        os << "metric,value\n"
           << "category," << strategy.category() << '\n'
           << "transactions," << st.submitted << '\n'
           << "blocks," << res.blocks.size() << '\n'
           << "included," << st.included << '\n'
           << "in_open_block," << st.in_open_block << '\n'
           << "pending," << st.pending << '\n'
           << "evicted," << st.evicted << '\n'
           << "rejected," << st.rejected << '\n'
           << "reserved_admissions," << st.reserved_admissions << '\n'
           << "submitted_fees," << fmt17(st.submitted_fees) << '\n'
           << "sealed_fees," << fmt17(st.sealed_fees) << '\n'
           << "open_block_fees," << fmt17(st.open_block_fees) << '\n'
           << "pending_fees," << fmt17(st.pending_fees) << '\n'
           << "dropped_fees," << fmt17(st.dropped_fees) << '\n'
           << "volatility," << fmt17(vol) << '\n'
           << "benchmark," << cls << '\n';
    }
    std::cout << "blocks " << res.blocks.size() << "\nvolatility " << fmt17(vol) << " (" << cls << ")\n";

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto m = manifest_base("simulate", argv, c, cfg);
    m["dataset"] = d.data_path.empty() ? json("synthetic") : json(d.data_path);
    m["irrational"] = d.irrational;
    write_manifest(dir, m, {"blocks.csv", "assignments.csv", "summary.csv"}, wall);
    return exit_ok;
}

struct OptimizeFlags {
    std::string algo = "";
    std::optional<int> category;
    bool grid = false;
    std::optional<std::int64_t> budget;
    std::optional<int> pop;
    std::optional<int> max_gen;
};

int experiment_number(dts::opt::Algorithm a, int category)
{
    int ai = 0;
    for (std::size_t i = 0; i < dts::opt::all_algorithms.size(); ++i)
        if (dts::opt::all_algorithms[i] == a)
            ai = int(i);
    int ci = 0;
    for (std::size_t i = 0; i < dts::opt::grid_category_order.size(); ++i)
        if (dts::opt::grid_category_order[i] == category)
            ci = int(i);
    return ai * 4 + ci + 1;
}

int cmd_optimize(const Common& c, const DataFlags& d, const StrategyFlags& s, const OptimizeFlags& o,
                 const std::string& out, const std::vector<std::string>& argv)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = resolve(c, &d, &s);
    auto& oc = cfg.optimizer;
    if (!o.algo.empty()) {
        try {
            oc.algorithm = dts::opt::parse_algorithm(o.algo);
        } catch (const std::invalid_argument& e) {
            throw dts::ConfigError(e.what());
        }
    }
    if (o.budget)
        oc.n_eval = *o.budget;
    if (o.pop)
        oc.n_pop = *o.pop;
    if (o.max_gen)
        oc.max_gen = *o.max_gen;
    if (oc.n_eval <= 0)
        throw dts::ConfigError("evaluation budget must be positive");
    if (oc.n_pop < 5)
        throw dts::ConfigError("population must hold at least 5 members");
    if (oc.max_gen < 1)
        throw dts::ConfigError("max_gen must be positive");
    const int category = o.category.value_or(cfg.category);

    dts::opt::PsoCoefficients pso;
    try {
        pso = dts::opt::constriction_params(oc.pso_k, oc.pso_phi1, oc.pso_phi2);
    } catch (const std::invalid_argument& e) {
        throw dts::ConfigError(e.what());
    }

    const auto txs = acquire_dataset(cfg, d);
    fs::create_directories(out);
    const fs::path dir(out);
    std::vector<std::string> outputs;

    auto trace_name = [](dts::opt::Algorithm a, int cat) {
        return "trace_" + std::string(dts::opt::to_string(a)) + "_c" + std::to_string(cat) + ".csv";
    };

    std::vector<dts::opt::GridRow> rows;
    if (o.grid) {
        rows = dts::opt::experiment_grid(txs, cfg.sim, oc);
    } else {
        dts::opt::GridRow r;
        r.algorithm = oc.algorithm;
        r.category = dts::category_by_id(category);
        r.experiment = experiment_number(oc.algorithm, category);
        r.run = dts::opt::optimize_category(oc.algorithm, r.category, txs, cfg.sim, oc);
        r.attributes = dts::opt::to_attributes(dts::opt::SearchSpace::for_category(r.category), r.run.best.x);
        r.volatility = r.run.best.value;
        r.evaluations = r.run.evaluations;
        rows.push_back(std::move(r));
    }
    const std::string table = o.grid ? "grid.csv" : "optimize.csv";
    {
        std::ofstream os(dir / table);
        dts::opt::write_grid_csv(os, rows);
        outputs.push_back(table);
    }
    for (const auto& r : rows) {
        const auto name = trace_name(r.algorithm, r.category.id);
        std::ofstream os(dir / name);
        dts::opt::write_trace_csv(os, r.run);
        outputs.push_back(name);
        std::cout << dts::opt::display_name(r.algorithm) << " experiment " << r.experiment << " category "
                  << r.category.id << " volatility " << fmt17(r.volatility) << '\n';
    }
    const bool used_pso = o.grid || oc.algorithm == dts::opt::Algorithm::pso;
    if (used_pso)
        std::printf("pso w=%.4f c1=%.4f c2=%.4f\n", pso.w, pso.c1, pso.c2);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto m = manifest_base("optimize", argv, c, cfg);
    m["dataset"] = d.data_path.empty() ? json("synthetic") : json(d.data_path);
    m["grid"] = o.grid;
    if (!o.grid) {
        m["algorithm"] = dts::opt::to_string(oc.algorithm);
        m["category"] = category;
    }
    m["budget"] = oc.n_eval;
    if (used_pso)
        m["pso"] = {{"k", oc.pso_k}, {"phi1", oc.pso_phi1}, {"phi2", oc.pso_phi2},
                    {"w", pso.w},    {"c1", pso.c1},        {"c2", pso.c2}};
    write_manifest(dir, m, outputs, wall);
    return exit_ok;
}

struct ProofFlags {
    std::vector<std::string> scenarios;
    std::vector<std::int64_t> ks{3, 5, 10};
    std::vector<std::string> modes{"smooth"};
    std::string out;
    bool check_published = false;
};

int cmd_proofsize(const ProofFlags& p)
{
    std::vector<dts::Scenario> scenarios;
    if (p.scenarios.empty()) {
        scenarios = dts::default_scenarios();
    } else {
        for (const auto& tok : p.scenarios) {
            const auto eq = tok.find('=');
            const std::string name = eq == std::string::npos ? tok : tok.substr(0, eq);
            const std::string num = eq == std::string::npos ? tok : tok.substr(eq + 1);
            std::int64_t n = 0;
            try {
                std::size_t used = 0;
                n = std::stoll(num, &used);
                if (used != num.size())
                    throw std::invalid_argument(num);
            } catch (const std::exception&) {
                throw dts::ConfigError("bad scenario '" + tok + "' (expected name=n or n)");
            }
            scenarios.push_back({name, n});
        }
    }
    for (const auto& s : scenarios)
        if (s.n_t < 2)
            throw dts::ConfigError("scenario " + s.name + ": need at least 2 transactions");
    for (auto k : p.ks)
        if (k < 2)
            throw dts::ConfigError("branching factor must be at least 2, got " + std::to_string(k));
    std::vector<dts::DepthRounding> modes;
    for (const auto& m : p.modes) {
        try {
            modes.push_back(dts::parse_depth_rounding(m));
        } catch (const std::invalid_argument& e) {
            throw dts::ConfigError(e.what());
        }
    }

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!p.out.empty()) {
        file.open(p.out);
        if (!file)
            throw dts::ConfigError("cannot write " + p.out);
        os = &file;
    }
    if (p.check_published) {
        *os << "scenario,n_t,k,published,computed,consistent\n";
        const auto cells = dts::published_proof_sizes();
        for (const auto& r : dts::check_published_cells(cells)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%.2f,%.6f,%s", r.cell.bytes, r.computed, r.consistent ? "yes" : "no");
            *os << r.cell.scenario << ',' << r.cell.n_t << ',' << r.cell.k << ',' << buf << '\n';
        }
        return exit_ok;
    }
    const auto rows = dts::bandwidth_report(scenarios, p.ks, modes);
    dts::write_bandwidth_csv(*os, rows);
    return exit_ok;
}

struct AssignmentRow {
    std::int64_t height;
    dts::TxId tx;
    double fee;
    std::int64_t nodes;
    std::int64_t line;
};

std::vector<AssignmentRow> read_assignments(const std::string& path)
{
    if (!fs::exists(path))
        throw dts::DataError("assignment CSV not found: " + path);
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line))
        throw dts::DataError(path + ": empty file");
    const auto header = dts::detail::split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[std::string(header[i])] = i;
    for (const char* need : {"height", "tx_id", "fee", "leaf_nodes"})
        if (!col.contains(need))
            throw dts::DataError(path + ": missing column " + need);
    std::vector<AssignmentRow> rows;
    std::vector<std::string> errors;
    std::int64_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = dts::detail::split_csv(line);
        if (f.size() < header.size()) {
            errors.push_back("line " + std::to_string(n) + ": too few fields");
            continue;
        }
        auto h = dts::detail::parse_number<std::int64_t>(f[col["height"]]);
        auto id = dts::detail::parse_number<dts::TxId>(f[col["tx_id"]]);
        auto fee = dts::detail::parse_number<double>(f[col["fee"]]);
        auto nodes = dts::detail::parse_number<std::int64_t>(f[col["leaf_nodes"]]);
        if (!h || !id || !fee || !nodes) {
            errors.push_back("line " + std::to_string(n) + ": unparsable field");
            continue;
        }
        rows.push_back({*h, *id, *fee, *nodes, n});
    }
    if (!errors.empty()) {
        std::string msg = path + ": malformed rows";
        for (const auto& e : errors)
            msg += "\n  " + e;
        throw dts::DataError(msg);
    }
    return rows;
}

int cmd_vrp_check(const std::string& blocks_path, std::size_t oracle_max_n, std::int64_t capacity,
                  std::optional<double> target)
{
    if (oracle_max_n > dts::vrp::oracle_max_transactions)
        throw dts::ConfigError("oracle limited to " + std::to_string(dts::vrp::oracle_max_transactions) +
                               " transactions, requested " + std::to_string(oracle_max_n));
    if (oracle_max_n < 1)
        throw dts::ConfigError("oracle size must be at least 1");
    const auto rows = read_assignments(blocks_path);

    // one matrix row per distinct transaction, one column per distinct block height
    std::map<std::int64_t, std::size_t> block_col;
    std::map<dts::TxId, std::size_t> tx_row;
    std::vector<dts::TxId> tx_order;
    dts::vrp::Instance inst;
    inst.capacity = capacity;
    for (const auto& r : rows) {
        block_col.emplace(r.height, block_col.size());
        if (tx_row.emplace(r.tx, tx_row.size()).second) {
            tx_order.push_back(r.tx);
            inst.fees.push_back(r.fee);
            inst.demands.push_back(r.nodes);
        }
    }
    std::vector<std::string> violations;
    std::map<std::pair<dts::TxId, std::int64_t>, int> seen;
    for (const auto& r : rows)
        if (++seen[{r.tx, r.height}] == 2)
            violations.push_back("transaction " + std::to_string(r.tx) + " listed twice in block " +
                                 std::to_string(r.height) + " (line " + std::to_string(r.line) + ")");
    dts::vrp::AssignmentMatrix m(tx_row.size(), block_col.size());
    for (const auto& r : rows)
        m.at(tx_row[r.tx], block_col[r.height]) = 1;
    for (const auto& v : dts::vrp::check_constraints(m, inst)) {
        if (v.kind == dts::vrp::Violation::Kind::row_sum)
            violations.push_back(v.message + " (tx " + std::to_string(tx_order[v.index]) + ")");
        else
            violations.push_back(v.message);
    }

    std::cout << "transactions," << tx_row.size() << "\nblocks," << block_col.size() << "\nviolations,"
              << violations.size() << '\n';
    for (const auto& v : violations)
        std::cout << "violation," << v << '\n';

    if (!rows.empty() && block_col.size() > 0) {
        const double var = dts::vrp::variance_objective(m, inst.fees);
        std::cout << "variance," << fmt17(var) << '\n';
        if (target) {
            const auto rep = dts::vrp::target_deviation(m, inst.fees, *target);
            std::cout << "target," << fmt17(*target) << "\nrms_deviation," << fmt17(rep.rms_deviation)
                      << "\nmax_abs_deviation," << fmt17(rep.max_abs_deviation) << '\n';
        }
    }

    // Oracle gap on the leading transactions of the first (up to three) blocks.
    if (violations.empty() && !rows.empty()) {
        std::vector<std::size_t> labels;
        dts::vrp::Instance small;
        small.capacity = capacity;
        std::map<std::int64_t, std::size_t> cols;
        for (const auto& r : rows) {
            if (labels.size() == oracle_max_n)
                break;
            if (!cols.contains(r.height) && cols.size() == dts::vrp::oracle_max_blocks)
                break;
            const auto k = cols.emplace(r.height, cols.size()).first->second;
            labels.push_back(k);
            small.fees.push_back(r.fee);
            small.demands.push_back(r.nodes);
        }
        const auto enc = dts::vrp::AssignmentMatrix::from_labels(labels, cols.size());
        const double enc_var = dts::vrp::variance_objective(enc, small.fees);
        const auto oracle = dts::vrp::brute_force_min_variance(small, cols.size(), oracle_max_n);
        std::cout << "oracle_transactions," << labels.size() << "\noracle_blocks," << cols.size()
                  << "\nencoded_variance," << fmt17(enc_var) << "\noracle_variance," << fmt17(oracle.variance)
                  << "\noracle_gap," << fmt17(enc_var - oracle.variance) << '\n';
    }
    return exit_ok;
}

int cmd_volatility(const std::string& in_path, const std::string& column, std::size_t window)
{
    if (!fs::exists(in_path))
        throw dts::DataError("input not found: " + in_path);
    std::ifstream in(in_path);
    std::string line;
    if (!std::getline(in, line))
        throw dts::DataError(in_path + ": empty file");
    const auto header = dts::detail::split_csv(line);
    std::size_t idx = 0;
    bool found = false;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) {
            idx = i;
            found = true;
        }
    if (!found) {
        if (header.size() == 1)
            idx = 0;
        else
            throw dts::DataError(in_path + ": no column named " + column);
    }
    std::vector<double> xs;
    std::vector<std::string> bad;
    std::int64_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = dts::detail::split_csv(line);
        std::optional<double> v;
        if (idx < f.size())
            v = dts::detail::parse_number<double>(f[idx]);
        if (!v) {
            bad.push_back("line " + std::to_string(n) + ": unparsable value");
            continue;
        }
        if (!(*v > 0.0))
            bad.push_back("line " + std::to_string(n) + ": non-positive value " + fmt17(*v));
        xs.push_back(*v);
    }
    if (!bad.empty()) {
        std::string msg = in_path + ": " + std::to_string(bad.size()) + " offending row(s)";
        for (const auto& b : bad)
            msg += "\n  " + b;
        throw dts::DataError(msg);
    }
    if (xs.size() < 3)
        throw dts::DataError(in_path + ": need at least 3 values for a volatility");

    if (window == 0) {
        const double v = dts::volatility(dts::log_returns(xs));
        std::cout << "returns," << xs.size() - 1 << "\nvolatility," << fmt17(v) << "\nbenchmark,"
                  << dts::to_string(dts::benchmark_check(v)) << '\n';
        return exit_ok;
    }
    if (window < 2 || window > xs.size() - 1)
        throw dts::ConfigError("window must be in 2.." + std::to_string(xs.size() - 1));
    const auto roll = dts::rolling_volatility(xs, window);
    std::cout << "window_end,volatility,benchmark\n";
    for (std::size_t i = 0; i < roll.size(); ++i)
        std::cout << (i + window) << ',' << fmt17(roll[i]) << ',' << dts::to_string(dts::benchmark_check(roll[i]))
                  << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Dynamic transaction storage simulator and strategy optimizer"};
    app.set_version_flag("--version", dts::version);
    app.require_subcommand(0, 1);

    Common common;
    bool print_defaults = false;
    app.add_option("--config", common.config_path, "INI configuration file");
    app.add_option("--seed", common.seed, "Random seed (overrides config and DTS_SEED)");
    app.add_option("--jobs", common.jobs, "Parallel objective evaluations")->check(CLI::PositiveNumber);
    app.add_flag("--print-defaults", print_defaults, "Print the default configuration as INI and exit");

    DataFlags sim_data, opt_data;
    StrategyFlags sim_strategy, opt_strategy;
    std::string sim_out = "out", opt_out = "out";
    auto* simulate = app.add_subcommand("simulate", "Run one strategy over a transaction stream");
    add_data_flags(simulate, sim_data);
    add_strategy_flags(simulate, sim_strategy);
    simulate->add_option("--out", sim_out, "Output directory");

    OptimizeFlags of;
    auto* optimize = app.add_subcommand("optimize", "Search strategy attributes with a metaheuristic");
    add_data_flags(optimize, opt_data);
    add_strategy_flags(optimize, opt_strategy);
    optimize->add_option("--algo", of.algo, "pso|de|ga|cmaes|gbo");
    optimize->add_flag("--grid", of.grid, "Run all 20 algorithm/category experiments");
    optimize->add_option("--budget", of.budget, "Objective evaluations per run");
    optimize->add_option("--pop", of.pop, "Population size");
    optimize->add_option("--max-gen", of.max_gen, "Generations including the initial population");
    optimize->add_option("--out", opt_out, "Output directory");

    ProofFlags pf;
    auto* proofsize = app.add_subcommand("proofsize", "Merkle and Verkle proof sizes per scenario");
    proofsize->add_option("--scenarios", pf.scenarios, "name=n_t or n_t entries")->delimiter(',');
    proofsize->add_option("--k", pf.ks, "Branching factors")->delimiter(',');
    proofsize->add_option("--mode", pf.modes, "ceil|smooth|floor")->delimiter(',');
    proofsize->add_option("--out", pf.out, "CSV path (stdout if omitted)");
    proofsize->add_flag("--check-published", pf.check_published, "Compare against the published table cells");

    std::string vrp_blocks;
    std::size_t vrp_max_n = dts::vrp::oracle_max_transactions;
    std::int64_t vrp_capacity = dts::default_leaf_capacity;
    std::optional<double> vrp_target;
    auto* vrp_check = app.add_subcommand("vrp-check", "Check a block assignment against the VRP constraints");
    vrp_check->add_option("--blocks", vrp_blocks, "assignments.csv from simulate")->required();
    vrp_check->add_option("--oracle-max-n", vrp_max_n, "Transactions in the brute-force instance (<= 12)");
    vrp_check->add_option("--capacity", vrp_capacity, "Leaf capacity per block");
    vrp_check->add_option("--target", vrp_target, "Reference incentive level for deviation reporting");

    std::string vol_in, vol_column = "incentive";
    std::size_t vol_window = 0;
    auto* vol = app.add_subcommand("volatility", "Volatility of an incentive series");
    vol->add_option("--in", vol_in, "CSV with an incentive column")->required();
    vol->add_option("--column", vol_column, "Column name");
    vol->add_option("--window", vol_window, "Rolling window in returns; 0 for the whole series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (print_defaults) {
            auto cfg = dts::default_config();
            if (!common.config_path.empty())
                cfg = dts::load_ini(common.config_path, cfg);
            if (common.seed)
                cfg.seed = *common.seed;
            std::cout << dts::to_ini(cfg);
            return exit_ok;
        }
        if (*simulate)
            return cmd_simulate(common, sim_data, sim_strategy, sim_out, args);
        if (*optimize)
            return cmd_optimize(common, opt_data, opt_strategy, of, opt_out, args);
        if (*proofsize)
            return cmd_proofsize(pf);
        if (*vrp_check)
            return cmd_vrp_check(vrp_blocks, vrp_max_n, vrp_capacity, vrp_target);
        if (*vol)
            return cmd_volatility(vol_in, vol_column, vol_window);
        std::cout << app.help();
        return exit_ok;
    } catch (const dts::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const dts::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    }
}
