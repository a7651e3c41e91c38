#include "tsidx/index.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace tsidx {

namespace {

constexpr int kSparseThresholdW = 20;  // dense root table up to 2^20 slots

// Bit of `symbol` that refines a prefix of `bits` to bits+1.
inline unsigned refinement_bit(std::uint8_t symbol, int bits) {
    return (symbol >> (kSymbolBits - 1 - bits)) & 1u;
}

template <typename Node>
Node* child_for(Node& node, std::span<const std::uint8_t> symbols) {
    const auto seg = static_cast<std::size_t>(node.split_segment);
    const int bits = node.word.card_bits[seg];
    return refinement_bit(symbols[seg], bits) ? node.child1.get() : node.child0.get();
}

std::unique_ptr<IndexNode> make_root_child(std::uint64_t key, const IndexConfig& config) {
    auto node = std::make_unique<IndexNode>();
    node->root_child = true;
    const auto w = static_cast<std::size_t>(config.w);
    node->word.symbols.resize(w);
    node->word.card_bits.assign(w, 1);
    for (std::size_t i = 0; i < w; ++i) {
        const unsigned bit = (key >> (w - 1 - i)) & 1u;
        node->word.symbols[i] = static_cast<std::uint8_t>(bit << (kSymbolBits - 1));
    }
    return node;
}

}  // namespace

void LeafEntries::append(std::span<const std::uint8_t> syms, std::uint32_t position) {
    symbols.insert(symbols.end(), syms.begin(), syms.end());
    positions.push_back(position);
}

bool IndexNode::is_overflow(const IndexConfig& config) const {
    if (!is_leaf() || entries.size() <= config.leaf_capacity) return false;
    for (std::uint8_t bits : word.card_bits)
        if (bits < config.max_card_bits) return false;
    return true;
}

RootTable::RootTable(int w) : w_(w), dense_(w <= kSparseThresholdW) {
    if (dense_) dense_nodes_.resize(std::size_t{1} << w);
}

std::size_t RootTable::slot_count() const {
    return dense_ ? dense_nodes_.size() : sparse_keys_.size();
}

std::uint64_t RootTable::key_at(std::size_t slot) const {
    return dense_ ? static_cast<std::uint64_t>(slot) : sparse_keys_[slot];
}

IndexNode* RootTable::node_at(std::size_t slot) const {
    return dense_ ? dense_nodes_[slot].get() : sparse_nodes_[slot].get();
}

IndexNode* RootTable::find(std::uint64_t key) const {
    if (dense_) {
        if (key >= dense_nodes_.size()) return nullptr;
        return dense_nodes_[key].get();
    }
    auto it = std::lower_bound(sparse_keys_.begin(), sparse_keys_.end(), key);
    if (it == sparse_keys_.end() || *it != key) return nullptr;
    return sparse_nodes_[static_cast<std::size_t>(it - sparse_keys_.begin())].get();
}

IndexNode& RootTable::create_at(std::size_t slot, std::uint64_t key, const IndexConfig& config) {
    auto& holder = dense_ ? dense_nodes_[slot] : sparse_nodes_[slot];
    holder = make_root_child(key, config);
    return *holder;
}

void RootTable::set_sparse_keys(std::vector<std::uint64_t> keys) {
    if (dense_) return;
    sparse_keys_ = std::move(keys);
    sparse_nodes_.clear();
    sparse_nodes_.resize(sparse_keys_.size());
}

SaxBuffers::SaxBuffers(const IndexConfig& config, unsigned workers)
    : w_(config.w),
      initial_part_size_(config.initial_buffer_part_size),
      workers_(workers),
      dense_(config.w <= kSparseThresholdW) {
    if (workers == 0) throw std::invalid_argument("SaxBuffers: workers must be at least 1");
    if (dense_)
        dense_parts_.resize((std::size_t{1} << config.w) * workers);
    else
        sparse_parts_.resize(workers);
}

void SaxBuffers::Part::push(std::span<const std::uint8_t> syms, std::uint32_t position,
                            std::size_t initial_capacity, int w) {
    if (positions.size() == positions.capacity()) {
        const std::size_t next =
            positions.capacity() == 0 ? initial_capacity : positions.capacity() * 2;
        positions.reserve(next);
        symbols.reserve(next * static_cast<std::size_t>(w));
    }
    symbols.insert(symbols.end(), syms.begin(), syms.end());
    positions.push_back(position);
}

void SaxBuffers::append(std::uint64_t key, unsigned worker,
                        std::span<const std::uint8_t> symbols, std::uint32_t position) {
    Part& part = dense_ ? dense_parts_[key * workers_ + worker] : sparse_parts_[worker][key];
    part.push(symbols, position, initial_part_size_, w_);
}

const SaxBuffers::Part* SaxBuffers::part_for(std::uint64_t key, unsigned worker) const {
    if (dense_) return &dense_parts_[key * workers_ + worker];
    const auto& m = sparse_parts_[worker];
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

std::size_t SaxBuffers::total_for(std::uint64_t key) const {
    std::size_t total = 0;
    for (unsigned worker = 0; worker < workers_; ++worker)
        if (const Part* p = part_for(key, worker)) total += p->size();
    return total;
}

std::vector<std::uint64_t> SaxBuffers::distinct_keys() const {
    std::set<std::uint64_t> keys;
    if (dense_) {
        for (std::size_t slot = 0; slot < dense_parts_.size() / workers_; ++slot)
            if (total_for(slot) > 0) keys.insert(slot);
    } else {
        for (const auto& m : sparse_parts_)
            for (const auto& [key, part] : m)
                if (part.size() > 0) keys.insert(key);
    }
    return {keys.begin(), keys.end()};
}

void summarization_phase(const Dataset& data, const IndexConfig& config, SaxBuffers& buffers,
                         std::atomic<std::size_t>& next_chunk, unsigned worker) {
    std::vector<double> means(static_cast<std::size_t>(config.w));
    std::vector<std::uint8_t> symbols(static_cast<std::size_t>(config.w));
    while (true) {
        const std::size_t chunk = next_chunk.fetch_add(1, std::memory_order_relaxed);
        if (chunk >= (data.count + config.chunk_size - 1) / config.chunk_size) break;
        const std::size_t begin = chunk * config.chunk_size;
        const std::size_t end = std::min(begin + config.chunk_size, data.count);
        for (std::size_t i = begin; i < end; ++i) {
            paa_into(data.series(i), config.w, means);
            symbols_from_paa(means, config.max_card_bits, symbols);
            buffers.append(root_key_from_symbols(symbols), worker, symbols,
                           static_cast<std::uint32_t>(i));
        }
    }
}

int choose_split_segment(const IndexNode& leaf, const IndexConfig& config) {
    const auto w = static_cast<std::size_t>(config.w);
    const std::size_t total = leaf.entries.size();
    int best = -1;
    std::size_t best_imbalance = std::numeric_limits<std::size_t>::max();
    for (std::size_t seg = 0; seg < w; ++seg) {
        const int bits = leaf.word.card_bits[seg];
        if (bits >= config.max_card_bits) continue;
        std::size_t ones = 0;
        for (std::size_t e = 0; e < total; ++e)
            ones += refinement_bit(leaf.entries.symbols[e * w + seg], bits);
        const std::size_t imbalance = ones * 2 > total ? ones * 2 - total : total - ones * 2;
        if (imbalance < best_imbalance) {  // strict: ties keep the lowest segment
            best_imbalance = imbalance;
            best = static_cast<int>(seg);
        }
    }
    return best;
}

bool split_leaf(IndexNode& leaf, const IndexConfig& config) {
    const int seg = choose_split_segment(leaf, config);
    if (seg < 0) return false;
    const auto useg = static_cast<std::size_t>(seg);
    const int bits = leaf.word.card_bits[useg];

    auto make_child = [&](unsigned bit) {
        auto child = std::make_unique<IndexNode>();
        child->word = leaf.word;
        child->word.card_bits[useg] = static_cast<std::uint8_t>(bits + 1);
        if (bit)
            child->word.symbols[useg] |= static_cast<std::uint8_t>(1u << (kSymbolBits - 1 - bits));
        return child;
    };
    auto child0 = make_child(0);
    auto child1 = make_child(1);

    for (std::size_t e = 0; e < leaf.entries.size(); ++e) {
        auto syms = leaf.entries.symbols_of(e, config.w);
        IndexNode& target = refinement_bit(syms[useg], bits) ? *child1 : *child0;
        target.entries.append(syms, leaf.entries.positions[e]);
    }
    child0->subtree_count = child0->entries.size();
    child1->subtree_count = child1->entries.size();

    leaf.entries = LeafEntries{};  // release the redistributed storage
    leaf.split_segment = seg;
    leaf.child0 = std::move(child0);
    leaf.child1 = std::move(child1);
    return true;
}

void insert_entry(IndexNode& subtree_root, std::span<const std::uint8_t> symbols,
                  std::uint32_t position, const IndexConfig& config) {
    IndexNode* node = &subtree_root;
    while (true) {
        if (node->is_leaf()) {
            if (node->entries.size() < config.leaf_capacity || !split_leaf(*node, config)) {
                node->entries.append(symbols, position);
                node->subtree_count += 1;
                return;
            }
            // The leaf just became inner; keep descending.
        }
        node->subtree_count += 1;
        node = child_for(*node, symbols);
    }
}

void tree_construction_phase(SaxBuffers& buffers, RootTable& roots, const IndexConfig& config,
                             std::atomic<std::size_t>& next_slot) {
    while (true) {
        const std::size_t slot = next_slot.fetch_add(1, std::memory_order_relaxed);
        if (slot >= roots.slot_count()) break;
        const std::uint64_t key = roots.key_at(slot);
        if (buffers.total_for(key) == 0) continue;
        IndexNode& root = roots.create_at(slot, key, config);
        buffers.drain_in_position_order(
            key, [&](std::span<const std::uint8_t> symbols, std::uint32_t position) {
                insert_entry(root, symbols, position, config);
            });
    }
}

Index::Index(Dataset dataset, IndexConfig config)
    : data_(std::move(dataset)), config_(config), roots_(config.w) {}

Index build_index(Dataset dataset, IndexConfig config) {
    config.validate();
    if (dataset.count == 0) throw std::invalid_argument("build_index: empty dataset");
    if (dataset.length != config.n)
        throw std::invalid_argument("build_index: dataset length " +
                                    std::to_string(dataset.length) +
                                    " does not match config.n " + std::to_string(config.n));
    if (dataset.count > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("build_index: more than 2^32-1 series");

    const auto t0 = std::chrono::steady_clock::now();
    const unsigned workers = config.index_workers();
    Index index(std::move(dataset), config);

    SaxBuffers buffers(config, workers);
    std::atomic<std::size_t> next_chunk{0};
    std::atomic<std::size_t> next_slot{0};
    RootTable& roots = index.roots();
    // The completion step pins the sparse slot list while all workers are
    // parked between the phases.
    std::barrier barrier(static_cast<std::ptrdiff_t>(workers), [&]() noexcept {
        if (!roots.dense()) roots.set_sparse_keys(buffers.distinct_keys());
    });

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned pid = 0; pid < workers; ++pid) {
        pool.emplace_back([&, pid] {
            summarization_phase(index.data(), config, buffers, next_chunk, pid);
            barrier.arrive_and_wait();
            tree_construction_phase(buffers, roots, config, next_slot);
        });
    }
    for (auto& t : pool) t.join();

    BuildStats stats;
    stats.series = index.data().count;
    struct Walker {
        const IndexConfig& config;
        BuildStats& stats;
        void walk(const IndexNode& node, std::size_t depth) {
            stats.nodes += 1;
            stats.max_depth = std::max(stats.max_depth, depth);
            if (node.is_leaf()) {
                stats.leaves += 1;
                if (node.entries.size() == 0) stats.empty_leaves += 1;
                if (node.is_overflow(config)) stats.overflow_leaves += 1;
            } else {
                stats.inner_nodes += 1;
                walk(*node.child0, depth + 1);
                walk(*node.child1, depth + 1);
            }
        }
    } walker{config, stats};
    roots.for_each([&](const IndexNode& node) { walker.walk(node, 1); });
    stats.build_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
            .count());
    index.build_stats() = stats;
    return index;
}

std::string BuildStats::kv_line() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "build series=%zu time_ns=%llu nodes=%zu inner=%zu leaves=%zu empty_leaves=%zu "
                  "overflow_leaves=%zu max_depth=%zu",
                  series, static_cast<unsigned long long>(build_ns), nodes, inner_nodes, leaves,
                  empty_leaves, overflow_leaves, max_depth);
    return buf;
}

namespace {

struct Auditor {
    const Index& index;
    const IndexConfig& config;
    ValidationReport& report;
    std::vector<std::uint8_t> seen;  // one flag per position

    void flag(const std::string& what) {
        report.violation_count += 1;
        if (report.violations.size() < 20) report.violations.push_back(what);
    }

    void audit_word(const IndexNode& node, const std::string& where) {
        const auto w = static_cast<std::size_t>(config.w);
        if (node.word.symbols.size() != w || node.word.card_bits.size() != w) {
            flag(where + ": word has wrong segment count");
            return;
        }
        for (std::size_t i = 0; i < w; ++i) {
            const int bits = node.word.card_bits[i];
            if (bits < 1 || bits > config.max_card_bits)
                flag(where + ": card_bits out of range");
            else if ((node.word.symbols[i] & ((1u << (kSymbolBits - bits)) - 1u)) != 0)
                flag(where + ": symbol has bits set below its prefix");
        }
    }

    void audit(const IndexNode& node, std::size_t depth) {
        report.nodes += 1;
        report.max_depth = std::max(report.max_depth, depth);
        audit_word(node, "node at depth " + std::to_string(depth));

        if (node.is_leaf()) {
            report.leaves += 1;
            const std::size_t fill = node.entries.size();
            report.total_entries += fill;
            if (fill == 0) report.empty_leaves += 1;
            if (fill > config.leaf_capacity) {
                if (node.is_overflow(config)) {
                    report.overflow_leaves += 1;
                } else {
                    flag("leaf above capacity but still splittable (" + std::to_string(fill) +
                         " entries)");
                }
                report.leaf_fill_histogram[10] += 1;
            } else {
                const std::size_t bucket =
                    std::min<std::size_t>(9, fill * 10 / std::max<std::size_t>(1, config.leaf_capacity));
                report.leaf_fill_histogram[bucket] += 1;
            }
            if (node.entries.symbols.size() !=
                fill * static_cast<std::size_t>(config.w))
                flag("leaf symbol storage out of step with positions");
            if (node.subtree_count != fill) flag("leaf subtree_count != entry count");

            for (std::size_t e = 0; e < fill; ++e) {
                auto syms = node.entries.symbols_of(e, config.w);
                const std::uint32_t pos = node.entries.positions[e];
                if (pos >= index.data().count) {
                    flag("entry position out of range");
                    continue;
                }
                SaxWordView entry{syms, full_bits};
                if (!matches_prefix(entry, node.word))
                    flag("entry at position " + std::to_string(pos) +
                         " does not match its leaf prefix");
                if (seen[pos]) flag("position " + std::to_string(pos) + " stored twice");
                seen[pos] = 1;
            }
            return;
        }

        report.inner_nodes += 1;
        if (!node.child0 || !node.child1) {
            flag("inner node with a missing child");
            return;
        }
        if (node.entries.size() != 0) flag("inner node still holds entries");
        if (node.split_segment < 0 || node.split_segment >= config.w) {
            flag("inner node with invalid split_segment");
            return;
        }
        const auto seg = static_cast<std::size_t>(node.split_segment);
        const int bits = node.word.card_bits[seg];
        for (const IndexNode* child : {node.child0.get(), node.child1.get()}) {
            for (std::size_t i = 0; i < node.word.symbols.size(); ++i) {
                const int expect_bits = node.word.card_bits[i] + (i == seg ? 1 : 0);
                if (child->word.card_bits[i] != expect_bits)
                    flag("child card_bits do not extend the parent by one on the split segment");
            }
        }
        const auto mask = static_cast<std::uint8_t>(1u << (kSymbolBits - 1 - bits));
        if ((node.child0->word.symbols[seg] & mask) != 0 ||
            (node.child1->word.symbols[seg] & mask) == 0)
            flag("children do not refine to bit 0 / bit 1 on the split segment");
        if (node.subtree_count != node.child0->subtree_count + node.child1->subtree_count)
            flag("inner subtree_count is not the sum of its children");

        audit(*node.child0, depth + 1);
        audit(*node.child1, depth + 1);
    }

    std::vector<std::uint8_t> full_bits;
};

}  // namespace

ValidationReport validate_index(const Index& index) {
    const IndexConfig& config = index.config();
    ValidationReport report;
    Auditor auditor{index, config, report, {}, {}};
    auditor.seen.assign(index.data().count, 0);
    auditor.full_bits.assign(static_cast<std::size_t>(config.w),
                             static_cast<std::uint8_t>(config.max_card_bits));

    index.roots().for_each([&](const IndexNode& node) {
        if (!node.root_child) auditor.flag("root table node not marked as a root child");
        for (std::uint8_t bits : node.word.card_bits)
            if (bits != 1) auditor.flag("root child word is not one bit per segment");
        auditor.audit(node, 1);
    });

    // Coverage plus a full re-derivation: every series' recomputed word must
    // descend to a leaf that actually stores it.
    std::vector<double> means(static_cast<std::size_t>(config.w));
    std::vector<std::uint8_t> symbols(static_cast<std::size_t>(config.w));
    for (std::size_t pos = 0; pos < index.data().count; ++pos) {
        if (!auditor.seen[pos]) {
            auditor.flag("position " + std::to_string(pos) + " missing from every leaf");
            continue;
        }
        paa_into(index.data().series(pos), config.w, means);
        symbols_from_paa(means, config.max_card_bits, symbols);
        const IndexNode* node = index.roots().find(root_key_from_symbols(symbols));
        if (node == nullptr) {
            auditor.flag("no root child for the word of position " + std::to_string(pos));
            continue;
        }
        while (!node->is_leaf()) node = child_for(*node, symbols);
        bool found = false;
        for (std::size_t e = 0; e < node->entries.size() && !found; ++e) {
            if (node->entries.positions[e] != pos) continue;
            found = true;
            auto stored = node->entries.symbols_of(e, config.w);
            if (!std::equal(stored.begin(), stored.end(), symbols.begin()))
                auditor.flag("stored word differs from the recomputed word at position " +
                             std::to_string(pos));
        }
        if (!found)
            auditor.flag("descent for position " + std::to_string(pos) +
                         " lands in a leaf that does not store it");
    }
    return report;
}

std::string ValidationReport::summary() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "validate nodes=%zu inner=%zu leaves=%zu empty_leaves=%zu overflow_leaves=%zu "
                  "max_depth=%zu entries=%zu violations=%zu",
                  nodes, inner_nodes, leaves, empty_leaves, overflow_leaves, max_depth,
                  total_entries, violation_count);
    return buf;
}

}  // namespace tsidx
