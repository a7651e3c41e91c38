#include "tsidx/sax.hpp"

#include <algorithm>
#include <stdexcept>

#include "tsidx/breakpoints.hpp"

namespace tsidx {

void paa_into(std::span<const float> series, int w, std::span<double> out) {
    if (w < 1) throw std::invalid_argument("paa: w must be at least 1");
    const std::size_t n = series.size();
    const std::size_t seg = n / static_cast<std::size_t>(w);
    if (seg == 0 || n % static_cast<std::size_t>(w) != 0)
        throw std::invalid_argument("paa: series length must be a nonzero multiple of w");
    if (out.size() != static_cast<std::size_t>(w))
        throw std::invalid_argument("paa: output size must equal w");
    const float* p = series.data();
    for (int i = 0; i < w; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < seg; ++j) sum += p[j];
        out[static_cast<std::size_t>(i)] = sum / static_cast<double>(seg);
        p += seg;
    }
}

std::vector<double> paa(std::span<const float> series, int w) {
    std::vector<double> out(static_cast<std::size_t>(w));
    paa_into(series, w, out);
    return out;
}

unsigned symbol_for_value(double value, unsigned cardinality) {
    auto thr = breakpoints_for(cardinality);
    // Number of thresholds <= value; a value on a threshold goes up.
    return static_cast<unsigned>(std::upper_bound(thr.begin(), thr.end(), value) - thr.begin());
}

void symbols_from_paa(std::span<const double> paa_means, int max_card_bits,
                      std::span<std::uint8_t> out) {
    if (out.size() != paa_means.size())
        throw std::invalid_argument("symbols_from_paa: output size must equal w");
    const unsigned cardinality = 1u << max_card_bits;
    const int shift = kSymbolBits - max_card_bits;
    for (std::size_t i = 0; i < paa_means.size(); ++i)
        out[i] = static_cast<std::uint8_t>(symbol_for_value(paa_means[i], cardinality) << shift);
}

SaxWord convert_to_isax(std::span<const float> series, const IndexConfig& config) {
    SaxWord word;
    word.symbols.resize(static_cast<std::size_t>(config.w));
    word.card_bits.assign(static_cast<std::size_t>(config.w),
                          static_cast<std::uint8_t>(config.max_card_bits));
    std::vector<double> means = paa(series, config.w);
    symbols_from_paa(means, config.max_card_bits, word.symbols);
    return word;
}

std::uint64_t root_key_from_symbols(std::span<const std::uint8_t> symbols) {
    std::uint64_t key = 0;
    for (std::uint8_t s : symbols) key = (key << 1) | (s >> (kSymbolBits - 1));
    return key;
}

std::uint64_t root_key(SaxWordView word) {
    return root_key_from_symbols(word.symbols);
}

bool matches_prefix(SaxWordView word, SaxWordView node_word) {
    if (word.symbols.size() != node_word.symbols.size())
        throw std::invalid_argument("matches_prefix: words have different segment counts");
    for (std::size_t i = 0; i < word.symbols.size(); ++i) {
        const int bits = node_word.card_bits[i];
        if (bits > word.card_bits[i])
            throw std::invalid_argument("matches_prefix: node word is finer than the word");
        if (bits == 0) continue;
        if (((word.symbols[i] ^ node_word.symbols[i]) >> (kSymbolBits - bits)) != 0)
            return false;
    }
    return true;
}

}  // namespace tsidx
