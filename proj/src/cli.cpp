#include "twobit/cli.hpp"

#include "twobit/collision_gap.hpp"
#include "twobit/dataset.hpp"
#include "twobit/error.hpp"
#include "twobit/estimation.hpp"
#include "twobit/experiments.hpp"
#include "twobit/lsh_engine.hpp"
#include "twobit/simulation.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace twobit {

namespace {

namespace fs = std::filesystem;

double parse_number(std::string_view text) {
    while (!text.empty() && text.front() == ' ') {
        text.remove_prefix(1);
    }
    while (!text.empty() && text.back() == ' ') {
        text.remove_suffix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ValidationError("bad number '" + std::string(text) + "' in grid");
    }
    return value;
}

std::vector<std::size_t> to_sizes(const std::vector<double>& values, const char* what) {
    std::vector<std::size_t> out;
    for (double v : values) {
        if (v < 0.0 || v != std::floor(v)) {
            throw ValidationError(std::string(what) + " must be non-negative integers");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// Output is assembled in memory and written in one go, so a failed run never
// leaves a partial file behind.
void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text(path, text);
    }
}

std::string cache_name(double w, double step) {
    return "table_w" + format_double(w) + "_s" + format_double(step) + ".tbpt";
}

ProbabilityTable obtain_table(double w, double step, const std::string& explicit_path) {
    if (!explicit_path.empty()) {
        auto table = ProbabilityTable::load(explicit_path);
        if (table.w() != w) {
            throw ValidationError("table " + explicit_path + " has w=" + format_double(table.w()) +
                                  " but w=" + format_double(w) + " was requested");
        }
        return table;
    }
    const char* cache = std::getenv(kTableCacheEnv);
    if (cache == nullptr || *cache == '\0') {
        return ProbabilityTable::build(w, step);
    }
    const fs::path path = fs::path(cache) / cache_name(w, step);
    if (fs::exists(path)) {
        return ProbabilityTable::load(path);
    }
    auto table = ProbabilityTable::build(w, step);
    fs::create_directories(path.parent_path());
    table.save(path);
    return table;
}

DataMatrix load_matrix(const std::string& path, const std::string& format, std::size_t dim) {
    DatasetSpec spec;
    spec.path = path;
    spec.format = parse_format(format);
    spec.dim = dim;
    return load_dataset(spec);
}

std::vector<Estimator> parse_estimators(const std::string& text) {
    std::vector<Estimator> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_estimator(item));
    }
    if (out.empty()) {
        throw ValidationError("estimator list is empty");
    }
    return out;
}

struct DataArgs {
    std::string path;
    std::string format = "csv";
    std::size_t dim = 0;

    void add(CLI::App* app, const char* flag, bool required) {
        auto* opt = app->add_option(flag, path, "data file");
        if (required) {
            opt->required();
        }
        app->add_option("--format", format, "csv or raw_f32")->capture_default_str();
        app->add_option("--dim", dim, "dimensionality (required for raw_f32)");
    }
    DataMatrix load() const { return load_matrix(path, format, dim); }
};

// ---- subcommands ----------------------------------------------------------

void cmd_tabulate(double w, double step, const std::string& out_path) {
    const auto table = ProbabilityTable::build(w, step);
    table.save(out_path);
}

std::string cmd_simulate_mse(const std::string& grid, std::size_t k, std::size_t trials, double w, double step,
                             std::uint64_t seed, const std::string& table_path) {
    SimulateMseConfig config;
    config.rho_grid = parse_grid(grid);
    config.k = k;
    config.trials = trials;
    config.w = w;
    config.seed = seed;
    config.validate();
    const auto table = obtain_table(w, step, table_path);
    std::string csv = "rho,estimator,empirical_mse,fisher_predicted_var\n";
    for (const auto& row : simulate_mse(config, table)) {
        csv += format_double(row.rho) + "," + row.estimator + "," + format_double(row.empirical_mse) + "," +
               format_double(row.fisher_predicted_var) + "\n";
    }
    return csv;
}

std::string cmd_gap_curves(const std::string& rho0_grid, const std::string& scheme, const std::string& w_grid,
                           const std::string& c_grid) {
    const auto rho0s = parse_grid(rho0_grid);
    const auto cs = parse_grid(c_grid);
    const auto ws = w_grid.empty() ? default_w_grid() : parse_grid(w_grid);
    std::vector<QuantScheme> schemes;
    if (scheme == "both") {
        schemes = {QuantScheme::Uniform, QuantScheme::Offset};
    } else {
        schemes = {parse_scheme(scheme)};
    }
    std::string csv = "rho0,c,w,scheme,p1,p2,gap\n";
    for (double rho0 : rho0s) {
        for (double c : cs) {
            for (double w : ws) {
                const auto query = GapQuery::make(rho0, c, w);
                for (QuantScheme s : schemes) {
                    const auto g = gap(query, s);
                    csv += format_double(rho0) + "," + format_double(c) + "," + format_double(w) + "," +
                           std::string(scheme_name(s)) + "," + format_double(g.p1) + "," + format_double(g.p2) +
                           "," + format_double(g.gap) + "\n";
                }
            }
        }
    }
    return csv;
}

std::string cmd_g_curve(const std::string& w_grid) {
    std::string csv = "w,g,g_squared\n";
    for (double w : parse_grid(w_grid)) {
        if (!(w > 0.0)) {
            throw ValidationError("w must be positive");
        }
        const double g = g_function(w);
        csv += format_double(w) + "," + format_double(g) + "," + format_double(g * g) + "\n";
    }
    return csv;
}

std::string cmd_query(const std::string& index_path, const DataArgs& queries, const std::string& sketch_path,
                      const std::string& estimator, std::size_t top, double step, const std::string& table_path) {
    const auto index = LshIndex::load(index_path);
    const auto qs = queries.load();
    if (qs.cols() != index.dim()) {
        throw ValidationError("query dimension " + std::to_string(qs.cols()) + " does not match index dimension " +
                              std::to_string(index.dim()));
    }
    if (sketch_path.empty()) {
        std::string csv = "query_id,rank,id\n";
        for (std::size_t q = 0; q < qs.rows(); ++q) {
            const auto cands = index.query(qs.row(q));
            for (std::size_t r = 0; r < cands.size() && (top == 0 || r < top); ++r) {
                csv += std::to_string(q) + "," + std::to_string(r + 1) + "," + std::to_string(cands[r]) + "\n";
            }
        }
        return csv;
    }
    const auto store = SketchStore::load(sketch_path);
    if (store.size() != index.size()) {
        throw ValidationError("sketch store holds " + std::to_string(store.size()) + " points but the index holds " +
                              std::to_string(index.size()));
    }
    const Estimator est = parse_estimator(estimator);
    const auto table = obtain_table(store.w(), step, table_path);
    std::string csv = "query_id,rank,id,rho_hat\n";
    for (std::size_t q = 0; q < qs.rows(); ++q) {
        const auto cands = index.query(qs.row(q));
        const auto sketch = store.encode_query(qs.row(q), qs.cols());
        const auto ranked = rerank(cands, sketch, store, est, table);
        for (std::size_t r = 0; r < ranked.size() && (top == 0 || r < top); ++r) {
            csv += std::to_string(q) + "," + std::to_string(r + 1) + "," + std::to_string(ranked[r].id) + "," +
                   format_double(ranked[r].rho_hat) + "\n";
        }
    }
    return csv;
}

std::string cmd_estimate(const std::string& sketch_path, const DataArgs& queries, const std::string& candidates,
                         const std::string& estimators, double step, const std::string& table_path) {
    const auto store = SketchStore::load(sketch_path);
    const auto qs = queries.load();
    std::vector<PointId> cand;
    if (candidates.empty()) {
        for (std::size_t i = 0; i < store.size(); ++i) {
            cand.push_back(static_cast<PointId>(i));
        }
    } else {
        for (auto id : to_sizes(parse_grid(candidates), "candidate ids")) {
            store.row(id);
            cand.push_back(static_cast<PointId>(id));
        }
    }
    const auto ests = parse_estimators(estimators);
    const auto table = obtain_table(store.w(), step, table_path);
    const double k = static_cast<double>(store.k());
    std::string csv = "pair_id,estimator,rho_hat,predicted_std\n";
    for (std::size_t q = 0; q < qs.rows(); ++q) {
        const auto sketch = store.encode_query(qs.row(q), qs.cols());
        for (std::size_t c = 0; c < cand.size(); ++c) {
            const auto counts = tally_cells(sketch.bytes(), store.row(cand[c]), store.k());
            const std::size_t pair_id = q * cand.size() + c;
            for (Estimator e : ests) {
                double rho_hat = 0.0;
                double info = 0.0;
                switch (e) {
                case Estimator::OneBit:
                    rho_hat = estimate_1bit(counts.same_sign(), counts.total());
                    info = fisher_info_1bit(rho_hat);
                    break;
                case Estimator::TwoBitLinear:
                    rho_hat = estimate_2bit_linear(counts, table).rho_hat;
                    info = fisher_info_2bit_linear(table, rho_hat);
                    break;
                case Estimator::TwoBitMle:
                    rho_hat = estimate_2bit_mle(counts, table).rho_hat;
                    info = fisher_info_2bit(table, rho_hat);
                    break;
                }
                const double sd = info > 0.0 ? std::sqrt(1.0 / (k * info)) : std::numeric_limits<double>::infinity();
                csv += std::to_string(pair_id) + "," + std::string(estimator_name(e)) + "," + format_double(rho_hat) +
                       "," + format_double(sd) + "\n";
            }
        }
    }
    return csv;
}

struct RerankArgs {
    DataArgs data;
    DataArgs queries;
    bool synthetic = false;
    PlantedSpec planted;
    std::size_t K = 10;
    std::string L_values = "50,100";
    double w1 = 1.5;
    double w = 0.75;
    std::string k_values = "100,200";
    std::string T_values = "10,20,50,100";
    std::string estimators = "two_bit_mle,two_bit_linear,one_bit";
    std::uint64_t seed = 7;
    double step = ProbabilityTable::kDefaultStep;
    std::string table_path;
    std::string out;
    std::string auc_out;
    std::string retrieval_out;
};

void cmd_rerank_eval(const RerankArgs& a, std::ostream& out) {
    ExperimentConfig config;
    config.K = a.K;
    config.L_values = to_sizes(parse_grid(a.L_values), "L values");
    config.w1 = a.w1;
    config.w = a.w;
    config.k_values = to_sizes(parse_grid(a.k_values), "k values");
    config.T_values = to_sizes(parse_grid(a.T_values), "T values");
    config.estimators = parse_estimators(a.estimators);
    config.seed = a.seed;

    DataMatrix data;
    DataMatrix queries;
    if (a.synthetic) {
        auto planted = make_planted_dataset(a.planted);
        data = std::move(planted.data);
        queries = std::move(planted.queries);
    } else {
        if (a.data.path.empty() || a.queries.path.empty()) {
            throw ValidationError("rerank-eval needs --data and --queries, or --synthetic");
        }
        // --dim doubles as the raw_f32 row width; csv infers it.
        DataArgs d = a.data;
        DataArgs q = a.queries;
        q.format = d.format;
        d.dim = q.dim = parse_format(d.format) == DataFormat::RawF32 ? a.planted.dim : 0;
        data = d.load();
        queries = q.load();
    }
    config.validate(data.rows());
    const auto table = obtain_table(a.w, a.step, a.table_path);
    const auto result = rerank_eval(data, queries, config, table);

    std::string curves = "T,m,precision,recall,estimator,L,k\n";
    for (const auto& r : result.curves) {
        curves += std::to_string(r.T) + "," + std::to_string(r.m) + "," + format_double(r.precision) + "," +
                  format_double(r.recall) + "," + std::string(estimator_name(r.estimator)) + "," +
                  std::to_string(r.L) + "," + std::to_string(r.k) + "\n";
    }
    std::string auc = "L,k,T,estimator,auc\n";
    for (const auto& r : result.auc) {
        auc += std::to_string(r.L) + "," + std::to_string(r.k) + "," + std::to_string(r.T) + "," +
               std::string(estimator_name(r.estimator)) + "," + format_double(r.auc) + "\n";
    }
    std::string retrieval = "query_id,L,candidates,fraction\n";
    for (const auto& r : result.retrieval) {
        retrieval += std::to_string(r.query) + "," + std::to_string(r.L) + "," + std::to_string(r.candidates) + "," +
                     format_double(r.fraction) + "\n";
    }
    emit(a.out, curves, out);
    if (!a.auc_out.empty()) {
        write_text(a.auc_out, auc);
    }
    if (!a.retrieval_out.empty()) {
        write_text(a.retrieval_out, retrieval);
    }
}

void add_planted_options(CLI::App* app, PlantedSpec& spec) {
    app->add_option("--n", spec.n, "number of points")->capture_default_str();
    app->add_option("--dim", spec.dim, "dimensionality")->capture_default_str();
    app->add_option("--clusters", spec.clusters, "number of clusters")->capture_default_str();
    app->add_option("--n-queries", spec.queries, "number of queries")->capture_default_str();
    app->add_option("--member-rho-min", spec.member_rho_min)->capture_default_str();
    app->add_option("--member-rho-max", spec.member_rho_max)->capture_default_str();
    app->add_option("--query-rho", spec.query_rho)->capture_default_str();
}

std::string one_line(std::string text) {
    for (char& ch : text) {
        if (ch == '\n' || ch == '\r') {
            ch = ' ';
        }
    }
    while (!text.empty() && text.back() == ' ') {
        text.pop_back();
    }
    return text;
}

} // namespace

std::vector<double> parse_grid(std::string_view text) {
    if (text.empty()) {
        throw ValidationError("empty grid");
    }
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
            throw ValidationError("range grid must look like lo:hi:step");
        }
        const double lo = parse_number(text.substr(0, a));
        const double hi = parse_number(text.substr(a + 1, b - a - 1));
        const double step = parse_number(text.substr(b + 1));
        if (!(step > 0.0) || hi < lo) {
            throw ValidationError("range grid needs step > 0 and hi >= lo");
        }
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (count > 100'000'000) {
            throw ValidationError("range grid too large");
        }
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(lo + static_cast<double>(i) * step);
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        out.push_back(parse_number(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"2-bit random projection coding, estimation and LSH tools", "twobit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::uint64_t seed = 1;
    double w = 0.75;
    double step = ProbabilityTable::kDefaultStep;
    std::string out_path;
    std::string table_path;

    auto* tabulate = app.add_subcommand("tabulate", "build a probability table and write it with a JSON sidecar");
    tabulate->add_option("--w", w, "threshold")->capture_default_str();
    tabulate->add_option("--step", step, "rho grid step")->capture_default_str();
    tabulate->add_option("--out", out_path, "output file")->required();

    std::string rho_grid = "0:0.95:0.05";
    std::size_t k = 200;
    std::size_t trials = 10000;
    auto* simulate = app.add_subcommand("simulate-mse", "empirical MSE of every estimator against 1/(k I)");
    simulate->add_option("--rho-grid", rho_grid, "rho values")->capture_default_str();
    simulate->add_option("--k", k, "projections per pair")->capture_default_str();
    simulate->add_option("--trials", trials, "trials per rho")->capture_default_str();
    simulate->add_option("--w", w, "threshold")->capture_default_str();
    simulate->add_option("--seed", seed)->capture_default_str();
    simulate->add_option("--step", step, "table grid step")->capture_default_str();
    simulate->add_option("--table", table_path, "precomputed table");
    simulate->add_option("--out", out_path, "output CSV (default stdout)");

    std::string rho0 = "0.5,0.7,0.9";
    std::string scheme = "both";
    std::string w_grid;
    std::string c_grid = "1.1,1.2,1.5,2";
    auto* gaps = app.add_subcommand("gap-curves", "collision probabilities and gap over w");
    gaps->add_option("--rho0", rho0, "target similarities")->capture_default_str();
    gaps->add_option("--scheme", scheme, "uniform, offset or both")->capture_default_str();
    gaps->add_option("--w-grid", w_grid, "bin widths (default: 200 geometric points over [0.25, 5])");
    gaps->add_option("--c-grid", c_grid, "approximation factors")->capture_default_str();
    gaps->add_option("--out", out_path, "output CSV (default stdout)");

    std::string g_grid = "0.3:3:0.001";
    auto* gcurve = app.add_subcommand("g-curve", "variance ratio of 1-bit over 2-bit at rho = 0");
    gcurve->add_option("--w-grid", g_grid, "thresholds")->capture_default_str();
    gcurve->add_option("--out", out_path, "output CSV (default stdout)");

    PlantedSpec planted;
    std::string data_out;
    std::string queries_out;
    std::string synth_format = "csv";
    auto* synth = app.add_subcommand("synth-data", "write a planted-neighbour dataset");
    add_planted_options(synth, planted);
    synth->add_option("--seed", planted.seed)->capture_default_str();
    synth->add_option("--format", synth_format, "csv or raw_f32")->capture_default_str();
    synth->add_option("--data-out", data_out, "data file")->required();
    synth->add_option("--queries-out", queries_out, "query file")->required();

    DataArgs build_data;
    IndexConfig index_config;
    auto* build = app.add_subcommand("build-index", "build (K, L) hash tables and save them");
    build_data.add(build, "--data", true);
    build->add_option("--K", index_config.K)->capture_default_str();
    build->add_option("--L", index_config.L)->capture_default_str();
    build->add_option("--w1", index_config.w1)->capture_default_str();
    build->add_option("--seed", index_config.seed)->capture_default_str();
    build->add_option("--out", out_path, "index file")->required();

    DataArgs sketch_data;
    std::uint64_t sketch_seed_value = 1;
    auto* sketch = app.add_subcommand("sketch", "store packed 2-bit codes of k projections per point");
    sketch_data.add(sketch, "--data", true);
    sketch->add_option("--k", k)->capture_default_str();
    sketch->add_option("--w", w)->capture_default_str();
    sketch->add_option("--seed", sketch_seed_value, "projection seed; use the index seed to share projections")
        ->capture_default_str();
    sketch->add_option("--out", out_path, "sketch file")->required();

    std::string index_path;
    DataArgs query_data;
    std::string sketch_path;
    std::string estimator = "two_bit_mle";
    std::size_t top = 0;
    auto* query = app.add_subcommand("query", "retrieve candidates, optionally reranked by a sketch store");
    query->add_option("--index", index_path)->required();
    query_data.add(query, "--queries", true);
    query->add_option("--sketch", sketch_path, "sketch store for reranking");
    query->add_option("--estimator", estimator)->capture_default_str();
    query->add_option("--top", top, "rows kept per query (0 = all)")->capture_default_str();
    query->add_option("--step", step, "table grid step")->capture_default_str();
    query->add_option("--table", table_path, "precomputed table");
    query->add_option("--out", out_path, "output CSV (default stdout)");

    DataArgs estimate_queries;
    std::string candidates;
    std::string estimators = "one_bit,two_bit_linear,two_bit_mle";
    auto* estimate = app.add_subcommand("estimate", "estimate similarities of query-candidate pairs");
    estimate->add_option("--sketch", sketch_path)->required();
    estimate_queries.add(estimate, "--queries", true);
    estimate->add_option("--candidates", candidates, "candidate ids (default: every stored point)");
    estimate->add_option("--estimators", estimators)->capture_default_str();
    estimate->add_option("--step", step, "table grid step")->capture_default_str();
    estimate->add_option("--table", table_path, "precomputed table");
    estimate->add_option("--out", out_path, "output CSV (default stdout)");

    RerankArgs rr;
    auto* rerank_cmd = app.add_subcommand("rerank-eval", "precision-recall of reranked LSH candidates");
    rerank_cmd->add_option("--data", rr.data.path);
    rerank_cmd->add_option("--queries", rr.queries.path);
    rerank_cmd->add_option("--format", rr.data.format, "csv or raw_f32")->capture_default_str();
    rerank_cmd->add_flag("--synthetic", rr.synthetic, "generate the planted-neighbour data instead");
    rerank_cmd->add_option("--data-seed", rr.planted.seed)->capture_default_str();
    add_planted_options(rerank_cmd, rr.planted);
    rerank_cmd->add_option("--K", rr.K)->capture_default_str();
    rerank_cmd->add_option("--L-values", rr.L_values)->capture_default_str();
    rerank_cmd->add_option("--w1", rr.w1)->capture_default_str();
    rerank_cmd->add_option("--w", rr.w)->capture_default_str();
    rerank_cmd->add_option("--k-values", rr.k_values)->capture_default_str();
    rerank_cmd->add_option("--T-values", rr.T_values)->capture_default_str();
    rerank_cmd->add_option("--estimators", rr.estimators)->capture_default_str();
    rerank_cmd->add_option("--seed", rr.seed)->capture_default_str();
    rerank_cmd->add_option("--step", rr.step, "table grid step")->capture_default_str();
    rerank_cmd->add_option("--table", rr.table_path, "precomputed table");
    rerank_cmd->add_option("--out", rr.out, "precision-recall CSV (default stdout)");
    rerank_cmd->add_option("--auc-out", rr.auc_out, "AUC CSV");
    rerank_cmd->add_option("--retrieval-out", rr.retrieval_out, "retrieved-fraction CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "twobit: error: " << one_line(e.what()) << "\n";
        return kExitValidation;
    }

    try {
        if (*tabulate) {
            cmd_tabulate(w, step, out_path);
        } else if (*simulate) {
            emit(out_path, cmd_simulate_mse(rho_grid, k, trials, w, step, seed, table_path), out);
        } else if (*gaps) {
            emit(out_path, cmd_gap_curves(rho0, scheme, w_grid, c_grid), out);
        } else if (*gcurve) {
            emit(out_path, cmd_g_curve(g_grid), out);
        } else if (*synth) {
            const auto format = parse_format(synth_format);
            const auto ds = make_planted_dataset(planted);
            if (format == DataFormat::Csv) {
                save_csv(ds.data, data_out);
                save_csv(ds.queries, queries_out);
            } else {
                save_raw_f32(ds.data, data_out);
                save_raw_f32(ds.queries, queries_out);
            }
        } else if (*build) {
            index_config.validate();
            LshIndex::build(build_data.load(), index_config).save(out_path);
        } else if (*sketch) {
            if (k < 1 || !(w > 0.0)) {
                throw ValidationError("sketch needs k >= 1 and w > 0");
            }
            SketchStore::encode(sketch_data.load(), k, w, sketch_seed_value).save(out_path);
        } else if (*query) {
            emit(out_path, cmd_query(index_path, query_data, sketch_path, estimator, top, step, table_path), out);
        } else if (*estimate) {
            emit(out_path, cmd_estimate(sketch_path, estimate_queries, candidates, estimators, step, table_path), out);
        } else if (*rerank_cmd) {
            cmd_rerank_eval(rr, out);
        }
    } catch (const ValidationError& e) {
        err << "twobit: error: " << one_line(e.what()) << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "twobit: error: " << one_line(e.what()) << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args, std::cout, std::cerr);
}

} // namespace twobit
