#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsidx/config.hpp"
#include "tsidx/dataset.hpp"
#include "tsidx/sax.hpp"

namespace tsidx {

// Contents of one leaf: full-cardinality words flattened w bytes per entry,
// parallel to the dataset positions they came from.
struct LeafEntries {
    std::vector<std::uint8_t> symbols;
    std::vector<std::uint32_t> positions;

    std::size_t size() const { return positions.size(); }
    std::span<const std::uint8_t> symbols_of(std::size_t i, int w) const {
        return {symbols.data() + i * static_cast<std::size_t>(w), static_cast<std::size_t>(w)};
    }
    void append(std::span<const std::uint8_t> syms, std::uint32_t position);
};

struct IndexNode {
    SaxWord word;
    bool root_child = false;
    int split_segment = -1;             // set when the node becomes inner
    std::unique_ptr<IndexNode> child0;  // refined bit 0
    std::unique_ptr<IndexNode> child1;  // refined bit 1
    LeafEntries entries;                // leaves only
    std::size_t subtree_count = 0;      // series stored at or below this node

    bool is_leaf() const { return child0 == nullptr; }
    // A leaf grows past capacity only once every segment is at full
    // cardinality and no further split is possible.
    bool is_overflow(const IndexConfig& config) const;
};

// First-level children of the (implicit) root, addressed by root key. Dense
// table of 2^w slots for w <= 20, otherwise a sorted sparse table whose
// slots are fixed between the two build phases.
class RootTable {
  public:
    explicit RootTable(int w);

    bool dense() const { return dense_; }
    std::size_t slot_count() const;
    std::uint64_t key_at(std::size_t slot) const;
    IndexNode* node_at(std::size_t slot) const;
    IndexNode* find(std::uint64_t key) const;
    // Installs the subtree root for a slot. Build-time only; each slot is
    // owned by exactly one worker.
    IndexNode& create_at(std::size_t slot, std::uint64_t key, const IndexConfig& config);
    // Fixes the slot list of a sparse table (no-op for dense tables).
    void set_sparse_keys(std::vector<std::uint64_t> keys);

    template <typename F>
    void for_each(F&& fn) const {
        for (std::size_t s = 0; s < slot_count(); ++s)
            if (IndexNode* node = node_at(s)) fn(*node);
    }

  private:
    int w_;
    bool dense_;
    std::vector<std::unique_ptr<IndexNode>> dense_nodes_;
    std::vector<std::uint64_t> sparse_keys_;  // sorted
    std::vector<std::unique_ptr<IndexNode>> sparse_nodes_;
};

// Staging buffers between the two build phases: one part per (root key,
// worker), written without synchronization because a part has exactly one
// writer. Parts materialize on first append with a small initial capacity
// and grow by doubling.
class SaxBuffers {
  public:
    SaxBuffers(const IndexConfig& config, unsigned workers);

    void append(std::uint64_t key, unsigned worker,
                std::span<const std::uint8_t> symbols, std::uint32_t position);

    std::size_t total_for(std::uint64_t key) const;
    // Sorted keys that received at least one entry (sparse tables only).
    std::vector<std::uint64_t> distinct_keys() const;

    // Emits every entry of a key ordered by dataset position. Parts are
    // position-sorted by construction (each worker claims chunks in
    // increasing order), so this is a k-way merge; the resulting insertion
    // order is independent of how chunks were distributed over workers.
    template <typename F>
    void drain_in_position_order(std::uint64_t key, F&& emit) const;

    unsigned workers() const { return workers_; }

  private:
    struct Part {
        std::vector<std::uint8_t> symbols;
        std::vector<std::uint32_t> positions;

        void push(std::span<const std::uint8_t> syms, std::uint32_t position,
                  std::size_t initial_capacity, int w);
        std::size_t size() const { return positions.size(); }
    };

    const Part* part_for(std::uint64_t key, unsigned worker) const;

    int w_;
    std::size_t initial_part_size_;
    unsigned workers_;
    bool dense_;
    std::vector<Part> dense_parts_;  // [key * workers + worker]
    std::vector<std::unordered_map<std::uint64_t, Part>> sparse_parts_;  // per worker
};

struct BuildStats {
    std::uint64_t build_ns = 0;
    std::size_t series = 0;
    std::size_t nodes = 0;
    std::size_t inner_nodes = 0;
    std::size_t leaves = 0;
    std::size_t empty_leaves = 0;
    std::size_t overflow_leaves = 0;
    std::size_t max_depth = 0;  // root children are depth 1

    std::string kv_line() const;
};

class Index {
  public:
    Index(Dataset dataset, IndexConfig config);

    const IndexConfig& config() const { return config_; }
    const Dataset& data() const { return data_; }
    std::span<const float> series(std::uint32_t position) const {
        return data_.series(position);
    }
    const RootTable& roots() const { return roots_; }
    RootTable& roots() { return roots_; }
    const BuildStats& build_stats() const { return stats_; }
    BuildStats& build_stats() { return stats_; }

  private:
    Dataset data_;
    IndexConfig config_;
    RootTable roots_;
    BuildStats stats_;
};

// Two-phase parallel construction: workers claim fixed-size chunks off a
// shared counter and summarize them into the staging buffers, then claim
// root slots off a second counter and build each subtree single-handedly.
Index build_index(Dataset dataset, IndexConfig config);

void summarization_phase(const Dataset& data, const IndexConfig& config,
                         SaxBuffers& buffers, std::atomic<std::size_t>& next_chunk,
                         unsigned worker);
void tree_construction_phase(SaxBuffers& buffers, RootTable& roots,
                             const IndexConfig& config,
                             std::atomic<std::size_t>& next_slot);

// Routes one entry to its leaf inside a subtree, splitting full leaves on
// the way down. Not thread-safe; a subtree has a single owner during build.
void insert_entry(IndexNode& subtree_root, std::span<const std::uint8_t> symbols,
                  std::uint32_t position, const IndexConfig& config);

// Most balanced split over the segments that can still be refined: the
// segment whose next bit divides the leaf's entries most evenly, ties going
// to the lowest segment index. Returns -1 when every segment is exhausted.
int choose_split_segment(const IndexNode& leaf, const IndexConfig& config);

// Turns a full leaf into an inner node with two children one bit deeper on
// the chosen segment. Returns false (leaf untouched) when unsplittable.
bool split_leaf(IndexNode& leaf, const IndexConfig& config);

struct ValidationReport {
    std::size_t nodes = 0;
    std::size_t inner_nodes = 0;
    std::size_t leaves = 0;
    std::size_t empty_leaves = 0;
    std::size_t overflow_leaves = 0;
    std::size_t max_depth = 0;
    std::size_t total_entries = 0;
    // Leaf fill as a fraction of capacity: ten buckets of 10% plus one for
    // overflow leaves.
    std::array<std::size_t, 11> leaf_fill_histogram{};
    std::vector<std::string> violations;  // first few, see violation_count
    std::size_t violation_count = 0;

    bool ok() const { return violation_count == 0; }
    std::string summary() const;
};

// Full structural audit: word and prefix consistency down every path, leaf
// occupancy, subtree counts, and a re-derivation of every series' word that
// confirms the series is stored in exactly the leaf its word descends to.
ValidationReport validate_index(const Index& index);

template <typename F>
void SaxBuffers::drain_in_position_order(std::uint64_t key, F&& emit) const {
    std::vector<const Part*> parts;
    parts.reserve(workers_);
    for (unsigned worker = 0; worker < workers_; ++worker) {
        const Part* p = part_for(key, worker);
        if (p != nullptr && p->size() > 0) parts.push_back(p);
    }
    const std::size_t live = parts.size();
    std::vector<std::size_t> cursor(live, 0);
    const auto w = static_cast<std::size_t>(w_);
    while (true) {
        std::size_t best = live;
        std::uint32_t best_pos = 0;
        for (std::size_t i = 0; i < live; ++i) {
            if (cursor[i] >= parts[i]->size()) continue;
            std::uint32_t pos = parts[i]->positions[cursor[i]];
            if (best == live || pos < best_pos) {
                best = i;
                best_pos = pos;
            }
        }
        if (best == live) break;
        const Part& p = *parts[best];
        emit(std::span<const std::uint8_t>{p.symbols.data() + cursor[best] * w, w}, best_pos);
        ++cursor[best];
    }
}

}  // namespace tsidx
