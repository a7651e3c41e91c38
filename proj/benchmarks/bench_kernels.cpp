// Microbenchmarks for the distance kernels and summarization primitives.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tsidx/metrics.hpp"
#include "tsidx/sax.hpp"

namespace {

constexpr std::size_t kN = 256;
constexpr int kW = 16;
constexpr int kWindow = 25;

std::vector<float> make_walk(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    std::vector<float> out(kN);
    double acc = 0.0;
    for (auto& v : out) {
        acc += step(rng);
        v = static_cast<float>(acc);
    }
    return out;
}

const std::vector<float>& series_a() {
    static const auto s = make_walk(1);
    return s;
}
const std::vector<float>& series_b() {
    static const auto s = make_walk(2);
    return s;
}

void bm_euclidean(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::euclidean(series_a(), series_b()));
}
BENCHMARK(bm_euclidean);

void bm_euclidean_abandoning(benchmark::State& state) {
    // A cutoff at half the true distance abandons partway through.
    const double cutoff = 0.5 * tsidx::euclidean(series_a(), series_b());
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::euclidean(series_a(), series_b(), cutoff));
}
BENCHMARK(bm_euclidean_abandoning);

void bm_dtw(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::dtw(series_a(), series_b(), kWindow));
}
BENCHMARK(bm_dtw);

void bm_keogh_envelope(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::keogh_envelope(series_a(), kWindow, kW));
}
BENCHMARK(bm_keogh_envelope);

void bm_lb_keogh(benchmark::State& state) {
    const auto envelope = tsidx::keogh_envelope(series_a(), kWindow, kW);
    for (auto _ : state) benchmark::DoNotOptimize(tsidx::lb_keogh(envelope, series_b()));
}
BENCHMARK(bm_lb_keogh);

void bm_paa(benchmark::State& state) {
    std::vector<double> out(kW);
    for (auto _ : state) {
        tsidx::paa_into(series_a(), kW, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(bm_paa);

void bm_convert_to_isax(benchmark::State& state) {
    tsidx::IndexConfig cfg;
    cfg.n = kN;
    cfg.w = kW;
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::convert_to_isax(series_b(), cfg));
}
BENCHMARK(bm_convert_to_isax);

void bm_mindist_paa_isax(benchmark::State& state) {
    tsidx::IndexConfig cfg;
    cfg.n = kN;
    cfg.w = kW;
    const auto query_paa = tsidx::paa(series_a(), kW);
    const auto word = tsidx::convert_to_isax(series_b(), cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::mindist_paa_isax(query_paa, word, kN));
}
BENCHMARK(bm_mindist_paa_isax);

void bm_mindist_envelope_isax(benchmark::State& state) {
    tsidx::IndexConfig cfg;
    cfg.n = kN;
    cfg.w = kW;
    const auto envelope = tsidx::keogh_envelope(series_a(), kWindow, kW);
    const auto word = tsidx::convert_to_isax(series_b(), cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(tsidx::mindist_envelope_isax(envelope, word, kN));
}
BENCHMARK(bm_mindist_envelope_isax);

}  // namespace

BENCHMARK_MAIN();
