// tsidx command line front end: dataset generation, index construction,
// exact 1-NN queries, benchmark sweeps, and structural validation.
//
// Machine-readable results go to stdout as key=value lines (or CSV for
// bench); diagnostics go to stderr. Exit status is 0 iff every requested
// check passed.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "tsidx/dataset.hpp"
#include "tsidx/index.hpp"
#include "tsidx/query.hpp"
#include "tsidx/scan.hpp"

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

struct BuildFlags {
    int w = 16;
    int leaf_size = 2000;
    std::size_t chunk_size = 20000;
    unsigned index_workers = 0;  // 0 = hardware parallelism
};

struct MeasureFlags {
    std::string measure = "ed";
    double window_frac = 0.1;
};

void add_build_flags(CLI::App* cmd, BuildFlags& flags) {
    cmd->add_option("--w", flags.w, "Number of PAA segments")
        ->default_val(16)
        ->check(CLI::Range(1, 64));
    cmd->add_option("--leaf-size", flags.leaf_size, "Leaf capacity")
        ->default_val(2000)
        ->check(CLI::Range(2, 1 << 24));
    cmd->add_option("--chunk-size", flags.chunk_size, "Series per build work unit")
        ->default_val(std::size_t{20000})
        ->check(CLI::PositiveNumber);
    cmd->add_option("--index-workers", flags.index_workers,
                    "Build threads (0 = hardware parallelism)")
        ->default_val(0u);
}

void add_measure_flags(CLI::App* cmd, MeasureFlags& flags) {
    cmd->add_option("--measure", flags.measure, "Distance measure")
        ->default_val("ed")
        ->check(CLI::IsMember({"ed", "dtw"}));
    cmd->add_option("--window-frac", flags.window_frac,
                    "DTW warping window as a fraction of the series length")
        ->default_val(0.1)
        ->check(CLI::Range(0.0, 0.999));
}

tsidx::Measure resolve_measure(const MeasureFlags& flags, std::size_t n) {
    if (flags.measure == "ed") return tsidx::Measure::ed();
    const int window = static_cast<int>(flags.window_frac * static_cast<double>(n));
    return tsidx::Measure::dtw(window);
}

// Loads a dataset and pads it up to a multiple of w so every series splits
// into equal segments; padding repeats the final value.
tsidx::Dataset load_padded(const std::string& path, std::size_t length, int w,
                           const char* what) {
    tsidx::Dataset data = tsidx::load_dataset(path, length);
    if (length % static_cast<std::size_t>(w) != 0) {
        tsidx::Dataset padded = tsidx::pad_to_segment_multiple(data, w);
        std::fprintf(stderr, "tsidx: padded %s from %zu to %zu points per series\n", what,
                     data.length, padded.length);
        return padded;
    }
    return data;
}

tsidx::IndexConfig make_config(std::size_t n, const BuildFlags& flags) {
    tsidx::IndexConfig cfg;
    cfg.n = n;
    cfg.w = flags.w;
    cfg.leaf_capacity = static_cast<std::size_t>(flags.leaf_size);
    cfg.chunk_size = flags.chunk_size;
    cfg.n_index_workers = flags.index_workers;
    return cfg;
}

bool distances_match(double got, double want) {
    if (got == want) return true;
    const double scale = std::max(std::abs(got), std::abs(want));
    return std::abs(got - want) <= 1e-6 * scale;
}

std::uint64_t median_ns(std::vector<std::uint64_t> times) {
    std::sort(times.begin(), times.end());
    return times.empty() ? 0 : times[times.size() / 2];
}

std::uint64_t mean_ns(const std::vector<std::uint64_t>& times) {
    if (times.empty()) return 0;
    const auto total = std::accumulate(times.begin(), times.end(), std::uint64_t{0});
    return total / times.size();
}

struct GenerateArgs {
    std::size_t count = 0;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    bool znorm = false;
    std::string out;
};

int run_generate(const GenerateArgs& args) {
    tsidx::Dataset data = tsidx::generate_random_walk(args.count, args.length, args.seed);
    std::size_t degenerate = 0;
    if (args.znorm) {
        for (std::size_t i = 0; i < data.count; ++i) {
            auto series = data.series_mut(i);
            if (!tsidx::znormalize(series)) {
                std::fill(series.begin(), series.end(), 0.0f);
                ++degenerate;
            }
        }
        if (degenerate > 0)
            std::fprintf(stderr, "tsidx: %zu near-constant series replaced with zeros\n",
                         degenerate);
    }
    tsidx::save_dataset(args.out, data);
    std::printf("generate count=%zu length=%zu seed=%" PRIu64
                " znorm=%d degenerate=%zu bytes=%zu out=%s\n",
                data.count, data.length, args.seed, args.znorm ? 1 : 0, degenerate,
                data.count * data.length * sizeof(float), args.out.c_str());
    return 0;
}

struct QueryArgs {
    std::string data_path;
    std::string queries_path;
    std::size_t length = 0;
    BuildFlags build;
    MeasureFlags measure;
    std::string mode = "mq";
    unsigned queues = 24;
    unsigned search_workers = 0;
    bool stats = false;
    bool oracle_check = false;
};

tsidx::SearchOptions search_options(const QueryArgs& args) {
    tsidx::SearchOptions options;
    options.workers = args.search_workers;
    options.queues = args.queues;
    options.mode = args.mode == "sq" ? tsidx::QueueMode::single : tsidx::QueueMode::multi;
    return options;
}

int run_query(const QueryArgs& args) {
    tsidx::Dataset data = load_padded(args.data_path, args.length, args.build.w, "dataset");
    tsidx::Dataset queries =
        load_padded(args.queries_path, args.length, args.build.w, "queries");
    const std::size_t n = data.length;
    const tsidx::Measure measure = resolve_measure(args.measure, n);
    const tsidx::SearchOptions options = search_options(args);

    tsidx::Index index = tsidx::build_index(std::move(data), make_config(n, args.build));
    std::printf("%s\n", index.build_stats().kv_line().c_str());

    std::vector<std::uint64_t> times;
    times.reserve(queries.count);
    std::size_t mismatches = 0;
    for (std::size_t q = 0; q < queries.count; ++q) {
        auto query = queries.series(q);
        const auto start = Clock::now();
        tsidx::SearchResult result = tsidx::exact_search(index, query, measure, options);
        const std::uint64_t ns = elapsed_ns(start);
        times.push_back(ns);
        std::printf("query id=%zu dist=%.9g pos=%u time_ns=%" PRIu64 "\n", q, result.distance,
                    result.position, ns);
        if (args.stats)
            std::printf("stats id=%zu %s\n", q, result.stats.kv_line().c_str());
        if (args.oracle_check) {
            tsidx::ScanResult truth = tsidx::scan_nn(index.data(), query, measure);
            const bool match = distances_match(result.distance, truth.distance);
            if (!match) ++mismatches;
            std::printf("oracle id=%zu verdict=%s scan_dist=%.9g scan_pos=%u\n", q,
                        match ? "MATCH" : "MISMATCH", truth.distance, truth.position);
        }
    }
    std::printf("summary queries=%zu mean_query_ns=%" PRIu64 " median_query_ns=%" PRIu64 "\n",
                queries.count, mean_ns(times), median_ns(times));
    if (args.oracle_check) {
        std::printf("oracle_summary matches=%zu mismatches=%zu\n", queries.count - mismatches,
                    mismatches);
        if (mismatches > 0) {
            std::fprintf(stderr, "tsidx: %zu of %zu queries disagreed with the scan oracle\n",
                         mismatches, queries.count);
            return 1;
        }
    }
    return 0;
}

struct BenchArgs {
    std::string data_path;
    std::string queries_path;
    std::size_t length = 0;
    int w = 16;
    MeasureFlags measure;
    std::string mode = "mq";
    std::vector<unsigned> workers{0};
    std::vector<unsigned> queues{24};
    std::vector<int> leaf_sizes{2000};
    std::vector<std::size_t> chunk_sizes{20000};
    std::string csv_path;
};

constexpr const char* kCsvHeader =
    "schema,count,length,w,leaf_size,chunk_size,measure,window,mode,workers,queues,"
    "build_ns,queries,mean_query_ns,median_query_ns,lb_node,lb_entry,real_dist,"
    "bsf_updates,pruned_subtrees,queue_insertions";

int run_bench(const BenchArgs& args) {
    tsidx::Dataset data = load_padded(args.data_path, args.length, args.w, "dataset");
    tsidx::Dataset queries = load_padded(args.queries_path, args.length, args.w, "queries");
    const std::size_t n = data.length;
    const tsidx::Measure measure = resolve_measure(args.measure, n);

    std::FILE* out = stdout;
    if (!args.csv_path.empty()) {
        out = std::fopen(args.csv_path.c_str(), "w");
        if (out == nullptr)
            throw std::runtime_error("cannot open " + args.csv_path + " for writing");
    }
    std::fprintf(out, "%s\n", kCsvHeader);

    for (int leaf_size : args.leaf_sizes) {
        for (std::size_t chunk_size : args.chunk_sizes) {
            for (unsigned workers : args.workers) {
                BuildFlags build{args.w, leaf_size, chunk_size, workers};
                tsidx::Dataset copy = data;  // the index owns its data
                const auto build_start = Clock::now();
                tsidx::Index index =
                    tsidx::build_index(std::move(copy), make_config(n, build));
                const std::uint64_t build_ns = elapsed_ns(build_start);

                for (unsigned queue_count : args.queues) {
                    tsidx::SearchOptions options;
                    options.workers = workers;
                    options.queues = queue_count;
                    options.mode = args.mode == "sq" ? tsidx::QueueMode::single
                                                     : tsidx::QueueMode::multi;

                    tsidx::SearchStats totals;
                    std::vector<std::uint64_t> times;
                    times.reserve(queries.count);
                    for (std::size_t q = 0; q < queries.count; ++q) {
                        const auto start = Clock::now();
                        tsidx::SearchResult result =
                            tsidx::exact_search(index, queries.series(q), measure, options);
                        times.push_back(elapsed_ns(start));
                        totals += result.stats;
                    }
                    std::fprintf(
                        out,
                        "1,%zu,%zu,%d,%d,%zu,%s,%d,%s,%u,%u,%" PRIu64 ",%zu,%" PRIu64
                        ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                        ",%" PRIu64 ",%" PRIu64 "\n",
                        index.data().count, n, args.w, leaf_size, chunk_size,
                        args.measure.measure.c_str(),
                        measure.kind == tsidx::MeasureKind::dtw ? measure.window : 0,
                        args.mode.c_str(), workers, queue_count, build_ns, queries.count,
                        mean_ns(times), median_ns(times),
                        static_cast<std::uint64_t>(totals.lb_node_calcs),
                        static_cast<std::uint64_t>(totals.lb_entry_calcs),
                        static_cast<std::uint64_t>(totals.real_dist_calcs),
                        static_cast<std::uint64_t>(totals.bsf_updates),
                        static_cast<std::uint64_t>(totals.pruned_subtrees),
                        static_cast<std::uint64_t>(totals.queue_insertions));
                }
            }
        }
    }
    if (out != stdout) std::fclose(out);
    return 0;
}

struct ValidateArgs {
    std::string data_path;
    std::size_t length = 0;
    BuildFlags build;
};

int run_validate(const ValidateArgs& args) {
    tsidx::Dataset data = load_padded(args.data_path, args.length, args.build.w, "dataset");
    const std::size_t n = data.length;
    tsidx::Index index = tsidx::build_index(std::move(data), make_config(n, args.build));
    std::printf("%s\n", index.build_stats().kv_line().c_str());

    tsidx::ValidationReport report = tsidx::validate_index(index);
    std::printf("%s\n", report.summary().c_str());
    for (const std::string& violation : report.violations)
        std::fprintf(stderr, "tsidx: violation: %s\n", violation.c_str());
    if (report.violation_count > report.violations.size())
        std::fprintf(stderr, "tsidx: ... and %zu more\n",
                     report.violation_count - report.violations.size());
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"In-memory data series index for exact 1-NN similarity search"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("generate", "Write a random-walk dataset file");
    cmd_gen->add_option("--count", gen.count, "Number of series")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--length", gen.length, "Points per series")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--seed", gen.seed, "Generator seed")->default_val(std::uint64_t{0});
    cmd_gen->add_flag("--znorm", gen.znorm, "Z-normalize each series");
    cmd_gen->add_option("--out", gen.out, "Output file")->required();

    QueryArgs query;
    CLI::App* cmd_query = app.add_subcommand("query", "Build an index and answer queries");
    cmd_query->add_option("--data", query.data_path, "Dataset file")->required();
    cmd_query->add_option("--queries", query.queries_path, "Query file")->required();
    cmd_query->add_option("--length", query.length, "Points per series")
        ->required()
        ->check(CLI::PositiveNumber);
    add_build_flags(cmd_query, query.build);
    add_measure_flags(cmd_query, query.measure);
    cmd_query->add_option("--mode", query.mode, "Queue mode")
        ->default_val("mq")
        ->check(CLI::IsMember({"sq", "mq"}));
    cmd_query->add_option("--queues", query.queues, "Number of leaf queues")
        ->default_val(24u)
        ->check(CLI::PositiveNumber);
    cmd_query->add_option("--search-workers", query.search_workers,
                          "Query threads (0 = hardware parallelism)")
        ->default_val(0u);
    cmd_query->add_flag("--stats", query.stats, "Print per-query search counters");
    cmd_query->add_flag("--oracle-check", query.oracle_check,
                        "Verify every answer against a linear scan");

    BenchArgs bench;
    CLI::App* cmd_bench = app.add_subcommand("bench", "Sweep configurations, emit CSV");
    cmd_bench->add_option("--data", bench.data_path, "Dataset file")->required();
    cmd_bench->add_option("--queries", bench.queries_path, "Query file")->required();
    cmd_bench->add_option("--length", bench.length, "Points per series")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_bench->add_option("--w", bench.w, "Number of PAA segments")
        ->default_val(16)
        ->check(CLI::Range(1, 64));
    add_measure_flags(cmd_bench, bench.measure);
    cmd_bench->add_option("--mode", bench.mode, "Queue mode")
        ->default_val("mq")
        ->check(CLI::IsMember({"sq", "mq"}));
    cmd_bench->add_option("--workers", bench.workers, "Worker counts to sweep")
        ->delimiter(',');
    cmd_bench->add_option("--queues", bench.queues, "Queue counts to sweep")->delimiter(',');
    cmd_bench->add_option("--leaf-sizes", bench.leaf_sizes, "Leaf capacities to sweep")
        ->delimiter(',');
    cmd_bench->add_option("--chunk-sizes", bench.chunk_sizes, "Chunk sizes to sweep")
        ->delimiter(',');
    cmd_bench->add_option("--csv", bench.csv_path, "Write CSV here instead of stdout");

    ValidateArgs validate;
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Build an index and audit its structure");
    cmd_validate->add_option("--data", validate.data_path, "Dataset file")->required();
    cmd_validate->add_option("--length", validate.length, "Points per series")
        ->required()
        ->check(CLI::PositiveNumber);
    add_build_flags(cmd_validate, validate.build);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gen->parsed()) return run_generate(gen);
        if (cmd_query->parsed()) return run_query(query);
        if (cmd_bench->parsed()) return run_bench(bench);
        return run_validate(validate);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "tsidx: %s\n", e.what());
        return 1;
    }
}
