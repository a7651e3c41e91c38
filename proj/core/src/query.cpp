#include "tsidx/query.hpp"

#include <algorithm>
#include <barrier>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace tsidx {

SearchStats& SearchStats::operator+=(const SearchStats& other) {
    lb_node_calcs += other.lb_node_calcs;
    lb_entry_calcs += other.lb_entry_calcs;
    real_dist_calcs += other.real_dist_calcs;
    bsf_updates += other.bsf_updates;
    pruned_subtrees += other.pruned_subtrees;
    queue_insertions += other.queue_insertions;
    return *this;
}

std::string SearchStats::kv_line() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "lb_node=%llu lb_entry=%llu real_dist=%llu bsf_updates=%llu "
                  "pruned_subtrees=%llu queue_insertions=%llu",
                  static_cast<unsigned long long>(lb_node_calcs),
                  static_cast<unsigned long long>(lb_entry_calcs),
                  static_cast<unsigned long long>(real_dist_calcs),
                  static_cast<unsigned long long>(bsf_updates),
                  static_cast<unsigned long long>(pruned_subtrees),
                  static_cast<unsigned long long>(queue_insertions));
    return buf;
}

bool SharedBsf::try_improve(double dist, std::uint32_t position) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (dist >= value_.load(std::memory_order_relaxed)) return false;
    value_.store(dist, std::memory_order_release);
    position_ = position;
    updates_ += 1;
    return true;
}

std::uint32_t SharedBsf::position() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return position_;
}

std::uint64_t SharedBsf::updates() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return updates_;
}

void LeafQueue::push(QueueEntry entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    heap_.push(entry);
}

std::optional<QueueEntry> LeafQueue::try_pop() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (heap_.empty()) return std::nullopt;
    QueueEntry top = heap_.top();
    heap_.pop();
    return top;
}

std::size_t LeafQueue::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return heap_.size();
}

std::optional<std::size_t> next_unfinished_queue(const QueueSet& queues, std::size_t current) {
    const std::size_t n = queues.size();
    for (std::size_t step = 1; step <= n; ++step) {
        const std::size_t q = (current + step) % n;
        if (!queues[q].finished()) return q;
    }
    return std::nullopt;
}

QueryState::QueryState(const Index& index_in, std::span<const float> query_in, Measure measure_in)
    : index(index_in), query(query_in), measure(measure_in) {
    const IndexConfig& config = index.config();
    if (query.size() != config.n)
        throw std::invalid_argument("query length " + std::to_string(query.size()) +
                                    " does not match the index series length " +
                                    std::to_string(config.n));
    if (measure.kind == MeasureKind::dtw) {
        if (measure.window < 0 || static_cast<std::size_t>(measure.window) >= config.n)
            throw std::invalid_argument("dtw window must be in [0, n)");
        envelope = keogh_envelope(query, measure.window, config.w);
    }
    query_paa = paa(query, config.w);
    query_word.symbols.resize(static_cast<std::size_t>(config.w));
    query_word.card_bits.assign(static_cast<std::size_t>(config.w),
                                static_cast<std::uint8_t>(config.max_card_bits));
    symbols_from_paa(query_paa, config.max_card_bits, query_word.symbols);
    full_card_bits.assign(static_cast<std::size_t>(config.w),
                          static_cast<std::uint8_t>(config.max_card_bits));
}

double node_lower_bound(const QueryState& state, const IndexNode& node) {
    const std::size_t n = state.index.config().n;
    return state.measure.kind == MeasureKind::euclidean
               ? mindist_paa_isax(state.query_paa, node.word, n)
               : mindist_envelope_isax(state.envelope, node.word, n);
}

namespace {

double entry_lower_bound(const QueryState& state, std::span<const std::uint8_t> symbols) {
    const std::size_t n = state.index.config().n;
    SaxWordView view{symbols, state.full_card_bits};
    return state.measure.kind == MeasureKind::euclidean
               ? mindist_paa_isax(state.query_paa, view, n)
               : mindist_envelope_isax(state.envelope, view, n);
}

}  // namespace

std::pair<double, std::uint32_t> calculate_real_distance_leaf(QueryState& state,
                                                              const IndexNode& leaf,
                                                              SearchStats& stats) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_pos = 0;
    const int w = state.index.config().w;
    const bool is_ed = state.measure.kind == MeasureKind::euclidean;

    for (std::size_t e = 0; e < leaf.entries.size(); ++e) {
        // Fresh BSF snapshot per entry: other workers may have tightened it.
        const double cutoff = std::min(best, state.bsf.load());
        stats.lb_entry_calcs += 1;
        auto symbols = leaf.entries.symbols_of(e, w);
        if (entry_lower_bound(state, symbols) >= cutoff) continue;
        const std::uint32_t pos = leaf.entries.positions[e];
        auto series = state.index.series(pos);
        double dist;
        if (is_ed) {
            stats.real_dist_calcs += 1;
            dist = euclidean(series, state.query, cutoff);
        } else {
            if (lb_keogh(state.envelope, series) >= cutoff) continue;
            stats.real_dist_calcs += 1;
            dist = dtw(state.query, series, state.measure.window, cutoff);
        }
        if (dist < best) {
            best = dist;
            best_pos = pos;
        }
    }
    return {best, best_pos};
}

void traverse_root_subtree(QueryState& state, const IndexNode& node, QueueSet& queues,
                           std::size_t& rr_cursor, SearchStats& stats) {
    if (&node == state.seeded_leaf) return;  // already folded into the BSF seed
    stats.lb_node_calcs += 1;
    const double bound = node_lower_bound(state, node);
    if (bound >= state.bsf.load()) {
        stats.pruned_subtrees += 1;
        return;
    }
    if (node.is_leaf()) {
        queues[rr_cursor].push({&node, bound});
        stats.queue_insertions += 1;
        rr_cursor = (rr_cursor + 1) % queues.size();
        return;
    }
    traverse_root_subtree(state, *node.child0, queues, rr_cursor, stats);
    traverse_root_subtree(state, *node.child1, queues, rr_cursor, stats);
}

void process_queue(QueryState& state, LeafQueue& queue, SearchStats& stats) {
    while (true) {
        auto entry = queue.try_pop();
        if (!entry) break;
        // Bounds leave the heap in increasing order, so the first one at or
        // past the BSF retires the whole queue.
        if (entry->dist >= state.bsf.load()) break;
        auto [dist, pos] = calculate_real_distance_leaf(state, *entry->leaf, stats);
        if (dist < state.bsf.load()) state.bsf.try_improve(dist, pos);
    }
    queue.mark_finished();
}

namespace {

// Picks the child to continue an approximate descent. Prefers the side the
// query's own bit selects, but never walks into an empty subtree.
const IndexNode* preferred_child(const QueryState& state, const IndexNode& node) {
    const auto seg = static_cast<std::size_t>(node.split_segment);
    const int bits = node.word.card_bits[seg];
    const unsigned bit =
        (state.query_word.symbols[seg] >> (kSymbolBits - 1 - bits)) & 1u;
    const IndexNode* chosen = bit ? node.child1.get() : node.child0.get();
    const IndexNode* other = bit ? node.child0.get() : node.child1.get();
    return chosen->subtree_count > 0 ? chosen : other;
}

// Greedy fallback when the query's root slot is empty: start from the root
// child with the smallest lower bound and always follow the cheaper side.
const IndexNode* greedy_root_child(const QueryState& state, SearchStats& stats) {
    const IndexNode* best = nullptr;
    double best_bound = std::numeric_limits<double>::infinity();
    state.index.roots().for_each([&](const IndexNode& node) {
        stats.lb_node_calcs += 1;
        const double bound = node_lower_bound(state, node);
        if (bound < best_bound) {
            best_bound = bound;
            best = &node;
        }
    });
    return best;
}

const IndexNode* cheaper_child(const QueryState& state, const IndexNode& node,
                               SearchStats& stats) {
    const IndexNode* c0 = node.child0.get();
    const IndexNode* c1 = node.child1.get();
    if (c0->subtree_count == 0) return c1;
    if (c1->subtree_count == 0) return c0;
    stats.lb_node_calcs += 2;
    return node_lower_bound(state, *c0) <= node_lower_bound(state, *c1) ? c0 : c1;
}

ApproxResult approximate_search_state(QueryState& state, SearchStats& stats) {
    const IndexNode* node = state.index.roots().find(root_key(state.query_word));
    const bool matched = node != nullptr && node->subtree_count > 0;
    if (!matched) node = greedy_root_child(state, stats);
    if (node == nullptr)
        throw std::logic_error("approximate_search: index has no root children");
    while (!node->is_leaf())
        node = matched ? preferred_child(state, *node) : cheaper_child(state, *node, stats);
    auto [dist, pos] = calculate_real_distance_leaf(state, *node, stats);
    state.bsf.try_improve(dist, pos);
    state.seeded_leaf = node;
    return {dist, pos};
}

SearchOptions resolve(const SearchOptions& options, const IndexConfig& config) {
    SearchOptions out;
    out.workers = options.workers == 0 ? config.search_workers() : options.workers;
    out.queues = options.queues == 0 ? config.n_queues : options.queues;
    out.mode = options.mode.value_or(config.queue_mode);
    if (*out.mode == QueueMode::single) out.queues = 1;
    return out;
}

}  // namespace

ApproxResult approximate_search(const Index& index, std::span<const float> query,
                                Measure measure) {
    QueryState state(index, query, measure);
    SearchStats stats;
    return approximate_search_state(state, stats);
}

SearchResult exact_search(const Index& index, std::span<const float> query, Measure measure,
                          SearchOptions options) {
    const SearchOptions opt = resolve(options, index.config());
    QueryState state(index, query, measure);
    SearchStats stats;
    approximate_search_state(state, stats);

    QueueSet queues(opt.queues);
    std::atomic<std::size_t> next_slot{0};
    std::barrier barrier(static_cast<std::ptrdiff_t>(opt.workers));
    std::vector<SearchStats> worker_stats(opt.workers);
    const RootTable& roots = index.roots();

    std::vector<std::thread> pool;
    pool.reserve(opt.workers);
    for (unsigned pid = 0; pid < opt.workers; ++pid) {
        pool.emplace_back([&, pid] {
            SearchStats& local = worker_stats[pid];
            std::size_t cursor = pid % opt.queues;
            while (true) {
                const std::size_t slot = next_slot.fetch_add(1, std::memory_order_relaxed);
                if (slot >= roots.slot_count()) break;
                if (const IndexNode* node = roots.node_at(slot))
                    traverse_root_subtree(state, *node, queues, cursor, local);
            }
            barrier.arrive_and_wait();
            std::size_t q = pid % opt.queues;
            while (true) {
                process_queue(state, queues[q], local);
                auto next = next_unfinished_queue(queues, q);
                if (!next) break;
                q = *next;
            }
        });
    }
    for (auto& t : pool) t.join();

    for (const auto& ws : worker_stats) stats += ws;
    stats.bsf_updates = state.bsf.updates();
    return {state.bsf.load(), state.bsf.position(), stats};
}

}  // namespace tsidx
