// End-to-end benchmarks: index construction and exact query answering.

#include <benchmark/benchmark.h>

#include "tsidx/dataset.hpp"
#include "tsidx/index.hpp"
#include "tsidx/query.hpp"
#include "tsidx/scan.hpp"

namespace {

constexpr std::size_t kCount = 20000;
constexpr std::size_t kN = 256;

const tsidx::Dataset& dataset() {
    static const tsidx::Dataset data = tsidx::generate_random_walk(kCount, kN, 99);
    return data;
}

const tsidx::Dataset& queries() {
    static const tsidx::Dataset data = tsidx::generate_random_walk(64, kN, 100);
    return data;
}

tsidx::IndexConfig config(unsigned workers) {
    tsidx::IndexConfig cfg;
    cfg.n = kN;
    cfg.w = 16;
    cfg.chunk_size = 2000;
    cfg.n_index_workers = workers;
    return cfg;
}

const tsidx::Index& shared_index() {
    static const tsidx::Index index = tsidx::build_index(tsidx::Dataset(dataset()), config(0));
    return index;
}

void bm_build(benchmark::State& state) {
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        tsidx::Dataset copy = dataset();
        state.ResumeTiming();
        tsidx::Index index = tsidx::build_index(std::move(copy), config(workers));
        benchmark::DoNotOptimize(index.build_stats().nodes);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(kCount));
}
BENCHMARK(bm_build)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void bm_approximate_search(benchmark::State& state) {
    const tsidx::Index& index = shared_index();
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            tsidx::approximate_search(index, queries().series(q % queries().count)));
        ++q;
    }
}
BENCHMARK(bm_approximate_search)->Unit(benchmark::kMicrosecond);

void bm_exact_search(benchmark::State& state) {
    const tsidx::Index& index = shared_index();
    tsidx::SearchOptions options;
    options.workers = static_cast<unsigned>(state.range(0));
    options.queues = static_cast<unsigned>(state.range(1));
    options.mode = state.range(1) == 1 ? tsidx::QueueMode::single : tsidx::QueueMode::multi;
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsidx::exact_search(
            index, queries().series(q % queries().count), tsidx::Measure::ed(), options));
        ++q;
    }
}
BENCHMARK(bm_exact_search)
    ->Args({1, 1})
    ->Args({1, 24})
    ->Args({4, 24})
    ->Unit(benchmark::kMillisecond);

void bm_exact_search_dtw(benchmark::State& state) {
    const tsidx::Index& index = shared_index();
    const tsidx::Measure measure = tsidx::Measure::dtw(25);
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsidx::exact_search(
            index, queries().series(q % queries().count), measure, {}));
        ++q;
    }
}
BENCHMARK(bm_exact_search_dtw)->Unit(benchmark::kMillisecond);

void bm_scan(benchmark::State& state) {
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsidx::scan_nn(
            dataset(), queries().series(q % queries().count), tsidx::Measure::ed(), 1));
        ++q;
    }
}
BENCHMARK(bm_scan)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
