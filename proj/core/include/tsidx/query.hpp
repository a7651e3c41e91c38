#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <span>
#include <string>

#include "tsidx/index.hpp"
#include "tsidx/metrics.hpp"

namespace tsidx {

struct SearchStats {
    std::uint64_t lb_node_calcs = 0;
    std::uint64_t lb_entry_calcs = 0;
    std::uint64_t real_dist_calcs = 0;
    std::uint64_t bsf_updates = 0;
    std::uint64_t pruned_subtrees = 0;
    std::uint64_t queue_insertions = 0;

    SearchStats& operator+=(const SearchStats& other);
    std::string kv_line() const;
};

// Best-so-far distance shared by all search workers. Reads are lock-free
// snapshots; improvements re-check under the lock so a stale candidate can
// never overwrite a better result.
class SharedBsf {
  public:
    double load() const { return value_.load(std::memory_order_acquire); }
    bool try_improve(double dist, std::uint32_t position);
    std::uint32_t position() const;
    std::uint64_t updates() const;

  private:
    std::atomic<double> value_{std::numeric_limits<double>::infinity()};
    mutable std::mutex mutex_;
    std::uint32_t position_ = 0;
    std::uint64_t updates_ = 0;
};

struct QueueEntry {
    const IndexNode* leaf = nullptr;
    double dist = 0.0;  // node lower bound at insertion time
};

// Min-heap of leaves keyed by lower bound, one lock per queue. `finished`
// latches once a pop hits the cutoff or runs empty; it never clears.
class LeafQueue {
  public:
    void push(QueueEntry entry);
    std::optional<QueueEntry> try_pop();
    void mark_finished() { finished_.store(true, std::memory_order_release); }
    bool finished() const { return finished_.load(std::memory_order_acquire); }
    std::size_t size() const;

  private:
    struct FurtherFirst {
        bool operator()(const QueueEntry& a, const QueueEntry& b) const {
            return a.dist > b.dist;
        }
    };
    mutable std::mutex mutex_;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, FurtherFirst> heap_;
    std::atomic<bool> finished_{false};
};

class QueueSet {
  public:
    explicit QueueSet(std::size_t n)
        : queues_(std::make_unique<LeafQueue[]>(n)), n_(n) {}
    LeafQueue& operator[](std::size_t i) { return queues_[i]; }
    const LeafQueue& operator[](std::size_t i) const { return queues_[i]; }
    std::size_t size() const { return n_; }

  private:
    std::unique_ptr<LeafQueue[]> queues_;
    std::size_t n_;
};

// Cyclic scan for the next queue still being worked on, starting after
// `current`. nullopt means every queue has finished.
std::optional<std::size_t> next_unfinished_queue(const QueueSet& queues, std::size_t current);

// Per-query context shared by all workers: the query's summaries, the
// envelope when the measure is DTW, and the shared best-so-far.
struct QueryState {
    QueryState(const Index& index, std::span<const float> query, Measure measure);

    const Index& index;
    std::span<const float> query;
    Measure measure;
    std::vector<double> query_paa;
    SaxWord query_word;
    Envelope envelope;  // dtw only
    std::vector<std::uint8_t> full_card_bits;
    SharedBsf bsf;
    const IndexNode* seeded_leaf = nullptr;  // evaluated during seeding, skipped later
};

// Lower bound between the query and everything stored under `node`.
double node_lower_bound(const QueryState& state, const IndexNode& node);

// True distances against one leaf, filtered entry by entry through the
// full-cardinality lower bound (and LB_Keogh for DTW) before any real
// distance runs. Returns the best distance found and its position; the
// caller folds it into the shared BSF.
std::pair<double, std::uint32_t> calculate_real_distance_leaf(QueryState& state,
                                                              const IndexNode& leaf,
                                                              SearchStats& stats);

// Recursive pruning descent from a root child: subtrees whose bound reaches
// the BSF are dropped, surviving leaves go to the queues round-robin.
void traverse_root_subtree(QueryState& state, const IndexNode& node, QueueSet& queues,
                           std::size_t& rr_cursor, SearchStats& stats);

// Pops entries in bound order until one reaches the BSF (everything behind
// it is at least as far) or the queue runs dry, then latches `finished`.
void process_queue(QueryState& state, LeafQueue& queue, SearchStats& stats);

struct ApproxResult {
    double distance = 0.0;
    std::uint32_t position = 0;
};

// Descends to the single leaf the query's own word points at and returns
// the closest series inside it. Falls back to the cheapest root child when
// the query's root slot is empty.
ApproxResult approximate_search(const Index& index, std::span<const float> query,
                                Measure measure = Measure::ed());

struct SearchOptions {
    unsigned workers = 0;  // 0 means the index config value
    unsigned queues = 0;   // 0 means the index config value
    std::optional<QueueMode> mode;
};

struct SearchResult {
    double distance = 0.0;
    std::uint32_t position = 0;
    SearchStats stats;
};

// Exact nearest neighbor: seeds the BSF with an approximate answer, then
// runs the traversal and queue-processing phases over worker threads.
SearchResult exact_search(const Index& index, std::span<const float> query,
                          Measure measure = Measure::ed(), SearchOptions options = {});

}  // namespace tsidx
