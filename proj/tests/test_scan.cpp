#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "tsidx/metrics.hpp"
#include "tsidx/scan.hpp"

using namespace tsidx;

namespace {

ScanResult reference_nn(const Dataset& data, std::span<const float> query,
                        const Measure& measure) {
    ScanResult best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < data.count; ++i) {
        double d = measure.kind == MeasureKind::euclidean
                       ? testutil::euclid_plain(data.series(i), query)
                       : dtw(data.series(i), query, measure.window);
        if (d < best.distance) best = {d, static_cast<std::uint32_t>(i)};
    }
    return best;
}

}  // namespace

TEST_CASE("scan matches a direct minimum and is thread-count invariant") {
    auto data = testutil::random_walk_dataset(500, 96, 11);
    auto queries = testutil::random_walk_dataset(8, 96, 12);
    for (std::size_t q = 0; q < queries.count; ++q) {
        auto query = queries.series(q);
        auto want = reference_nn(data, query, Measure::ed());
        for (unsigned threads : {1u, 2u, 5u}) {
            auto got = scan_nn(data, query, Measure::ed(), threads);
            CHECK(got.position == want.position);
            CHECK(got.distance == doctest::Approx(want.distance).epsilon(1e-12));
        }
    }
}

TEST_CASE("scan supports dtw") {
    auto data = testutil::random_walk_dataset(200, 64, 21);
    auto queries = testutil::random_walk_dataset(4, 64, 22);
    Measure m = Measure::dtw(6);
    for (std::size_t q = 0; q < queries.count; ++q) {
        auto query = queries.series(q);
        auto want = reference_nn(data, query, m);
        auto got = scan_nn(data, query, m, 3);
        CHECK(got.position == want.position);
        CHECK(got.distance == doctest::Approx(want.distance).epsilon(1e-12));
    }
}

TEST_CASE("ties resolve to the lowest position") {
    // Three exact copies of the query scattered through the dataset.
    auto data = testutil::random_walk_dataset(50, 32, 31);
    auto query_row = testutil::random_walk_dataset(1, 32, 32);
    auto query = query_row.series(0);
    for (std::size_t at : {7u, 23u, 41u}) {
        std::copy(query.begin(), query.end(), data.series_mut(at).begin());
    }
    for (unsigned threads : {1u, 4u}) {
        auto got = scan_nn(data, query, Measure::ed(), threads);
        CHECK(got.distance == 0.0);
        CHECK(got.position == 7);
    }
}

TEST_CASE("scan validates inputs") {
    Dataset empty;
    std::vector<float> q(4, 0.f);
    CHECK_THROWS_AS(scan_nn(empty, q, Measure::ed(), 1), std::invalid_argument);

    auto data = testutil::random_walk_dataset(3, 8, 1);
    std::vector<float> wrong(7, 0.f);
    CHECK_THROWS_AS(scan_nn(data, wrong, Measure::ed(), 1), std::invalid_argument);
}
