#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "tsidx/breakpoints.hpp"
#include "tsidx/sax.hpp"

using namespace tsidx;

namespace {

IndexConfig config_of(std::size_t n, int w, int bits) {
    IndexConfig c;
    c.n = n;
    c.w = w;
    c.max_card_bits = bits;
    return c;
}

// Symbol assignment by linear threshold counting, the slow way.
unsigned symbol_by_counting(double value, unsigned cardinality) {
    auto thr = breakpoints_for(cardinality);
    unsigned count = 0;
    for (double t : thr)
        if (t <= value) ++count;
    return count;
}

}  // namespace

TEST_CASE("paa averages equal-length segments") {
    std::vector<float> series{0.f, 2.f, 4.f, 6.f};
    auto means = paa(series, 2);
    REQUIRE(means.size() == 2);
    CHECK(means[0] == doctest::Approx(1.0));
    CHECK(means[1] == doctest::Approx(5.0));

    auto identity = paa(series, 4);
    for (int i = 0; i < 4; ++i) CHECK(identity[i] == doctest::Approx(series[i]));

    CHECK_THROWS_AS(paa(series, 3), std::invalid_argument);
    CHECK_THROWS_AS(paa(std::span<const float>{}, 1), std::invalid_argument);
}

TEST_CASE("symbol assignment counts thresholds at or below the value") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uni(-4.0, 4.0);
    for (unsigned c : {2u, 4u, 16u, 256u}) {
        for (int i = 0; i < 500; ++i) {
            double v = uni(rng);
            CHECK(symbol_for_value(v, c) == symbol_by_counting(v, c));
        }
        // Boundary convention: a value on a threshold takes the upper region.
        auto thr = breakpoints_for(c);
        for (std::size_t i = 0; i < thr.size(); ++i)
            CHECK(symbol_for_value(thr[i], c) == i + 1);
    }
    CHECK(symbol_for_value(0.0, 4) == 2);
    CHECK(symbol_for_value(-1.0, 4) == 0);
    CHECK(symbol_for_value(0.1, 4) == 2);
}

TEST_CASE("all-zero series maps to the middle symbol at full cardinality") {
    std::vector<float> zeros(256, 0.f);
    auto word = convert_to_isax(zeros, config_of(256, 16, 8));
    REQUIRE(word.symbols.size() == 16);
    for (int i = 0; i < 16; ++i) {
        CHECK(word.symbols[i] == 128);
        CHECK(word.card_bits[i] == 8);
    }
}

TEST_CASE("symbols store left-aligned prefixes") {
    // With 4-bit cardinality a middle value yields region 8 = 1000b, stored
    // as 10000000b so the top bit still decides the root subtree.
    std::vector<float> zeros(16, 0.f);
    auto word = convert_to_isax(zeros, config_of(16, 4, 4));
    for (int i = 0; i < 4; ++i) CHECK(word.symbols[i] == 0x80);
}

TEST_CASE("root keys concatenate first bits, segment 0 most significant") {
    SaxWord word;
    word.symbols = {0x80, 0x00, 0xff, 0x00};
    word.card_bits = {8, 8, 8, 8};
    CHECK(root_key(word) == 0b1010);

    word.symbols = {0xff, 0xff, 0xff, 0xff};
    CHECK(root_key(word) == 15);

    word.symbols = {0x00, 0x00, 0x00, 0x00};
    CHECK(root_key(word) == 0);
}

TEST_CASE("matches_prefix compares top bits per segment") {
    SaxWord word;
    word.symbols = {0b10110000};
    word.card_bits = {8};

    SaxWord node;
    node.symbols = {0b10000000};
    node.card_bits = {1};
    CHECK(matches_prefix(word, node));

    node.symbols = {0b10100000};
    node.card_bits = {3};
    CHECK(matches_prefix(word, node));

    node.symbols = {0b11000000};
    node.card_bits = {2};
    CHECK_FALSE(matches_prefix(word, node));

    // Finer node than word is a caller error.
    SaxWord shallow;
    shallow.symbols = {0b10000000};
    shallow.card_bits = {1};
    CHECK_THROWS_AS(matches_prefix(shallow, word), std::invalid_argument);
}

TEST_CASE("prefix matching nests: matching at b+1 bits implies matching at b") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 200; ++trial) {
        SaxWord word;
        word.symbols = {static_cast<std::uint8_t>(byte(rng)),
                        static_cast<std::uint8_t>(byte(rng))};
        word.card_bits = {8, 8};
        SaxWord fine = word, coarse = word;
        int b = 1 + (byte(rng) % 7);
        for (int s = 0; s < 2; ++s) {
            fine.card_bits[s] = static_cast<std::uint8_t>(b + 1);
            coarse.card_bits[s] = static_cast<std::uint8_t>(b);
            fine.symbols[s] &= static_cast<std::uint8_t>(0xff << (8 - (b + 1)));
            coarse.symbols[s] &= static_cast<std::uint8_t>(0xff << (8 - b));
        }
        if (matches_prefix(word, fine)) CHECK(matches_prefix(word, coarse));
    }
}

TEST_CASE("conversion matches a per-value oracle on random walks") {
    std::mt19937_64 rng(11);
    auto cfg = config_of(64, 8, 8);
    for (int trial = 0; trial < 100; ++trial) {
        auto series = testutil::random_walk(64, rng);
        auto means = paa(series, cfg.w);
        auto word = convert_to_isax(series, cfg);
        for (int s = 0; s < cfg.w; ++s) {
            unsigned expect = symbol_by_counting(means[static_cast<std::size_t>(s)], 256);
            CHECK(word.symbols[static_cast<std::size_t>(s)] == expect);
        }
    }
}
