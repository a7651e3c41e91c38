#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "tsidx/metrics.hpp"
#include "tsidx/sax.hpp"

using namespace tsidx;

namespace {

IndexConfig small_config(std::size_t n, int w) {
    IndexConfig c;
    c.n = n;
    c.w = w;
    return c;
}

SaxWord word_with(std::vector<std::uint8_t> symbols, std::vector<std::uint8_t> bits) {
    SaxWord w;
    w.symbols = std::move(symbols);
    w.card_bits = std::move(bits);
    return w;
}

// Random word truncation: keep between 1 and max bits per segment.
SaxWord truncate_word(const SaxWord& full, std::mt19937_64& rng) {
    SaxWord out = full;
    std::uniform_int_distribution<int> pick(1, 8);
    for (std::size_t i = 0; i < out.symbols.size(); ++i) {
        int b = pick(rng);
        out.card_bits[i] = static_cast<std::uint8_t>(b);
        out.symbols[i] &= static_cast<std::uint8_t>(0xff << (8 - b));
    }
    return out;
}

}  // namespace

TEST_CASE("euclidean basics") {
    std::vector<float> a{0.f, 0.f, 0.f, 0.f};
    std::vector<float> b{1.f, 1.f, 1.f, 1.f};
    CHECK(euclidean(a, b) == doctest::Approx(2.0));
    CHECK(euclidean(a, a) == 0.0);
    std::vector<float> c{1.f, 2.f};
    CHECK_THROWS_AS(euclidean(a, c), std::invalid_argument);
}

TEST_CASE("early abandonment triggers inside the crossing block") {
    std::vector<float> a{0.f, 0.f, 0.f, 0.f};
    std::vector<float> b{1.f, 1.f, 1.f, 1.f};
    CHECK(euclidean(a, b, 1.5) == kAbandoned);
    CHECK(euclidean(a, b, 2.0) == doctest::Approx(2.0));  // equal sum survives
}

TEST_CASE("surviving abandoning calls equal the plain kernel bit for bit") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = testutil::random_walk(96, rng);
        auto b = testutil::random_walk(96, rng);
        double full = euclidean(a, b);
        double loose = euclidean(a, b, full + 1.0);
        CHECK(loose == full);  // exact equality, same summation order
        CHECK(euclidean(a, b, full * 0.5) == kAbandoned);
        CHECK(full == doctest::Approx(testutil::euclid_plain(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("mindist example: query in the lower half against upper-half words") {
    // n=4, w=2, both query segment means are -1; the word says both segments
    // sit in the upper half, so each segment contributes a gap of 1 and the
    // segment length 2 scales the sum to sqrt(2 * 2) = 2.
    std::vector<double> query_paa{-1.0, -1.0};
    auto word = word_with({0x80, 0x80}, {1, 1});
    CHECK(mindist_paa_isax(query_paa, word, 4) == doctest::Approx(2.0));
}

TEST_CASE("mindist is zero when the query PAA lies inside every region") {
    std::vector<float> zeros(32, 0.f);
    auto cfg = small_config(32, 4);
    auto word = convert_to_isax(zeros, cfg);
    CHECK(mindist_paa_isax(paa(zeros, 4), word, 32) == 0.0);
}

TEST_CASE("mindist lower-bounds euclidean, at full and reduced cardinality") {
    std::mt19937_64 rng(17);
    auto cfg = small_config(64, 8);
    for (int trial = 0; trial < 2000; ++trial) {
        auto q = testutil::random_walk(64, rng);
        auto s = testutil::random_walk(64, rng);
        auto q_paa = paa(q, cfg.w);
        auto word = convert_to_isax(s, cfg);
        double ed = euclidean(q, s);
        CHECK(mindist_paa_isax(q_paa, word, 64) <= ed + 1e-9);
        auto coarse = truncate_word(word, rng);
        CHECK(mindist_paa_isax(q_paa, coarse, 64) <= ed + 1e-9);
        // Widening the region can only lower the bound.
        CHECK(mindist_paa_isax(q_paa, coarse, 64) <=
              mindist_paa_isax(q_paa, word, 64) + 1e-12);
    }
}

TEST_CASE("dtw matches exhaustive path enumeration on tiny inputs") {
    std::vector<float> a{0.f, 0.f, 1.f};
    std::vector<float> b{0.f, 1.f, 1.f};
    CHECK(dtw(a, b, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<float> uni(-2.f, 2.f);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + trial % 5;
        std::vector<float> x(n), y(n);
        for (auto& v : x) v = uni(rng);
        for (auto& v : y) v = uni(rng);
        for (int window : {0, 1, static_cast<int>(n) - 1}) {
            double expect = testutil::dtw_exhaustive(x, y, window);
            CHECK(dtw(x, y, window) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("dtw window edge cases") {
    std::mt19937_64 rng(29);
    auto a = testutil::random_walk(48, rng);
    auto b = testutil::random_walk(48, rng);
    // window 0 walks the diagonal, which is the Euclidean distance.
    CHECK(dtw(a, b, 0) == doctest::Approx(euclidean(a, b)).epsilon(1e-9));
    // widening the window can only shrink the distance
    double prev = dtw(a, b, 0);
    for (int window : {1, 2, 5, 12, 47}) {
        double d = dtw(a, b, window);
        CHECK(d <= prev + 1e-9);
        prev = d;
    }
    CHECK(dtw(a, b, 47) <= euclidean(a, b) + 1e-9);
    CHECK_THROWS_AS(dtw(a, b, 48), std::invalid_argument);
    CHECK_THROWS_AS(dtw(a, b, -1), std::invalid_argument);
}

TEST_CASE("dtw abandonment is sound") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = testutil::random_walk(32, rng);
        auto b = testutil::random_walk(32, rng);
        double full = dtw(a, b, 3);
        CHECK(dtw(a, b, 3, full + 1e-6) == doctest::Approx(full));
        CHECK(dtw(a, b, 3, full * 0.5) == kAbandoned);
    }
}

TEST_CASE("envelope example and brute-force agreement") {
    std::vector<float> q{0.f, 1.f, 0.f};
    auto env = keogh_envelope(q, 1, 1);
    CHECK(env.upper == std::vector<float>{1.f, 1.f, 1.f});
    CHECK(env.lower == std::vector<float>{0.f, 0.f, 0.f});

    std::vector<float> c{2.f, 2.f, 2.f};
    CHECK(lb_keogh(env, c) == doctest::Approx(std::sqrt(3.0)));

    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        auto x = testutil::random_walk(40, rng);
        for (int r : {0, 1, 4, 10, 39}) {
            auto env2 = keogh_envelope(x, r, 8);
            CHECK(env2.upper == testutil::window_max(x, r));
            CHECK(env2.lower == testutil::window_min(x, r));
        }
    }
}

TEST_CASE("a series never leaves its own envelope") {
    std::mt19937_64 rng(41);
    auto q = testutil::random_walk(64, rng);
    for (int r : {0, 3, 7}) {
        auto env = keogh_envelope(q, r, 8);
        CHECK(lb_keogh(env, q) == 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            CHECK(env.lower[i] <= q[i]);
            CHECK(env.upper[i] >= q[i]);
        }
    }
}

TEST_CASE("mindist_envelope example: bands below lower-half-free regions") {
    // n=4, w=2; both band PAAs span [-2,-1] while the word pins both
    // segments to the upper half, giving a gap of 1 per segment.
    Envelope env;
    env.lower_paa = {-2.0, -2.0};
    env.upper_paa = {-1.0, -1.0};
    env.window = 1;
    auto word = word_with({0x80, 0x80}, {1, 1});
    CHECK(mindist_envelope_isax(env, word, 4) == doctest::Approx(2.0));
}

TEST_CASE("DTW bound chain: envelope-isax <= lb_keogh <= dtw") {
    std::mt19937_64 rng(43);
    auto cfg = small_config(64, 8);
    const int window = 6;  // 10% of 64, rounded down
    for (int trial = 0; trial < 1000; ++trial) {
        auto q = testutil::random_walk(64, rng);
        auto s = testutil::random_walk(64, rng);
        auto env = keogh_envelope(q, window, cfg.w);
        auto word = convert_to_isax(s, cfg);
        double d = dtw(q, s, window);
        double lbk = lb_keogh(env, s);
        double lbe = mindist_envelope_isax(env, word, 64);
        CHECK(lbk <= d + 1e-9);
        CHECK(lbe <= d + 1e-9);
        auto coarse = truncate_word(word, rng);
        CHECK(mindist_envelope_isax(env, coarse, 64) <= d + 1e-9);
    }
}
