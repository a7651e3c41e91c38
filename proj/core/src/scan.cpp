#include "tsidx/scan.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tsidx/config.hpp"

namespace tsidx {

namespace {

ScanResult scan_range(const Dataset& data, std::span<const float> query, Measure measure,
                      std::size_t begin, std::size_t end) {
    ScanResult best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = begin; i < end; ++i) {
        const double d = measure.kind == MeasureKind::euclidean
                             ? euclidean(data.series(i), query, best.distance)
                             : dtw(data.series(i), query, measure.window, best.distance);
        if (d < best.distance) {
            best.distance = d;
            best.position = static_cast<std::uint32_t>(i);
        }
    }
    return best;
}

}  // namespace

ScanResult scan_nn(const Dataset& data, std::span<const float> query, Measure measure,
                   unsigned n_threads) {
    if (data.count == 0) throw std::invalid_argument("scan_nn: empty dataset");
    if (query.size() != data.length)
        throw std::invalid_argument("scan_nn: query length does not match the dataset");
    if (n_threads == 0) n_threads = IndexConfig::default_workers();
    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(n_threads, data.count));

    if (threads == 1) return scan_range(data, query, measure, 0, data.count);

    std::vector<ScanResult> results(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t begin = data.count * t / threads;
            const std::size_t end = data.count * (t + 1) / threads;
            results[t] = scan_range(data, query, measure, begin, end);
        });
    }
    for (auto& th : pool) th.join();

    // Ranges ascend by position, so taking strictly better results in order
    // resolves ties to the lowest position.
    ScanResult best = results[0];
    for (unsigned t = 1; t < threads; ++t)
        if (results[t].distance < best.distance) best = results[t];
    return best;
}

}  // namespace tsidx
