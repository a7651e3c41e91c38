#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsidx/config.hpp"

namespace tsidx {

// Symbols are stored left-aligned in a byte: the top bit is the coarsest
// split, and a prefix of b bits occupies bit positions [7, 8-b]. Comparing
// words at reduced cardinality is then a shift of both operands.
inline constexpr int kSymbolBits = 8;

// An iSAX word: one symbol per segment plus the per-segment cardinality in
// bits. card_bits[i] top bits of symbols[i] are meaningful, the rest are 0.
struct SaxWord {
    std::vector<std::uint8_t> symbols;
    std::vector<std::uint8_t> card_bits;

    int w() const { return static_cast<int>(symbols.size()); }
};

struct SaxWordView {
    std::span<const std::uint8_t> symbols;
    std::span<const std::uint8_t> card_bits;

    SaxWordView() = default;
    SaxWordView(std::span<const std::uint8_t> s, std::span<const std::uint8_t> c)
        : symbols(s), card_bits(c) {}
    SaxWordView(const SaxWord& word) : symbols(word.symbols), card_bits(word.card_bits) {}

    int w() const { return static_cast<int>(symbols.size()); }
};

// Piecewise aggregate approximation: the mean of each of the w equal-length
// segments. series.size() must be a nonzero multiple of w.
std::vector<double> paa(std::span<const float> series, int w);

// Allocation-free variant for hot paths; out.size() must equal w.
void paa_into(std::span<const float> series, int w, std::span<double> out);

// Region index of a value at the given cardinality: the number of
// breakpoints <= value, so a value sitting exactly on a threshold lands in
// the region above it.
unsigned symbol_for_value(double value, unsigned cardinality);

// Full-cardinality symbols (left-aligned) for a PAA vector.
void symbols_from_paa(std::span<const double> paa_means, int max_card_bits,
                      std::span<std::uint8_t> out);

// Full-cardinality iSAX word of a series (card_bits[i] = max_card_bits).
SaxWord convert_to_isax(std::span<const float> series, const IndexConfig& config);

// First bit of every segment, segment 0 most significant.
std::uint64_t root_key(SaxWordView word);
std::uint64_t root_key_from_symbols(std::span<const std::uint8_t> symbols);

// True iff `word` agrees with `node_word` on every segment's node prefix.
// Requires node_word.card_bits[i] <= word.card_bits[i] for all i.
bool matches_prefix(SaxWordView word, SaxWordView node_word);

}  // namespace tsidx
