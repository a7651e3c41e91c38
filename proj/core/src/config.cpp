#include "tsidx/config.hpp"

#include <stdexcept>
#include <string>
#include <thread>

namespace tsidx {

unsigned IndexConfig::default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

unsigned IndexConfig::index_workers() const {
    return n_index_workers == 0 ? default_workers() : n_index_workers;
}

unsigned IndexConfig::search_workers() const {
    return n_search_workers == 0 ? default_workers() : n_search_workers;
}

void IndexConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("IndexConfig: " + msg); };
    if (w < 1) fail("w must be at least 1");
    if (w > 64) fail("w must be at most 64 (root keys are 64-bit)");
    if (max_card_bits < 1 || max_card_bits > 8)
        fail("max_card_bits must be in [1, 8]");
    if (n < static_cast<std::size_t>(w)) fail("n must be at least w");
    if (n % static_cast<std::size_t>(w) != 0)
        fail("n (" + std::to_string(n) + ") must be a multiple of w (" + std::to_string(w) + ")");
    if (leaf_capacity < 2) fail("leaf_capacity must be at least 2");
    if (chunk_size < 1) fail("chunk_size must be at least 1");
    if (n_queues < 1) fail("n_queues must be at least 1");
    if (initial_buffer_part_size < 1) fail("initial_buffer_part_size must be at least 1");
}

}  // namespace tsidx
