#pragma once

#include <cstddef>

namespace tsidx {

enum class QueueMode { single, multi };

// Build- and search-time parameters. The defaults are the usual desk-scale
// setup: 16 segments, 256-symbol alphabet, 2000-entry leaves, 20000-series
// summarization chunks, 24 leaf queues.
struct IndexConfig {
    std::size_t n = 256;              // series length, must be a multiple of w
    int w = 16;                       // number of PAA segments per series
    int max_card_bits = 8;            // symbol bits at full cardinality, <= 8
    std::size_t leaf_capacity = 2000;
    std::size_t chunk_size = 20000;   // series per summarization work unit
    unsigned n_index_workers = 0;     // 0 means hardware parallelism
    unsigned n_search_workers = 0;    // 0 means hardware parallelism
    unsigned n_queues = 24;
    QueueMode queue_mode = QueueMode::multi;
    std::size_t initial_buffer_part_size = 5;

    static unsigned default_workers();

    std::size_t segment_length() const { return n / static_cast<std::size_t>(w); }
    unsigned index_workers() const;
    unsigned search_workers() const;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

}  // namespace tsidx
