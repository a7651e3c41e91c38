#pragma once

#include <cstdint>
#include <span>

#include "tsidx/dataset.hpp"
#include "tsidx/metrics.hpp"

namespace tsidx {

struct ScanResult {
    double distance = 0.0;
    std::uint32_t position = 0;
};

// Exhaustive nearest neighbor over contiguous thread partitions, each with
// early abandonment against its local best. Ties resolve to the lowest
// position regardless of thread count; 0 threads means hardware parallelism.
ScanResult scan_nn(const Dataset& data, std::span<const float> query, Measure measure,
                   unsigned n_threads = 0);

}  // namespace tsidx
