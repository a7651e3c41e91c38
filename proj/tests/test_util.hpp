#pragma once

// Shared helpers for the test suites. The oracles here intentionally use
// different algorithms than the library (bisection instead of a rational
// approximation, exhaustive path search instead of dynamic programming,
// windowed rescans instead of deques) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "tsidx/dataset.hpp"

namespace testutil {

// Standard normal CDF in long double, for quantile checks.
inline long double normal_cdf_ld(long double x) {
    return 0.5L * erfcl(-x / sqrtl(2.0L));
}

// Quantile by bisection on the CDF; independent of the library's
// approximation route.
inline double quantile_bisect(double p) {
    long double lo = -12.0L, hi = 12.0L;
    for (int i = 0; i < 200; ++i) {
        long double mid = 0.5L * (lo + hi);
        if (normal_cdf_ld(mid) < static_cast<long double>(p))
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

// Windowed extrema by direct rescan.
inline std::vector<float> window_max(std::span<const float> x, int r) {
    std::vector<float> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        std::size_t lo = j >= static_cast<std::size_t>(r) ? j - static_cast<std::size_t>(r) : 0;
        std::size_t hi = std::min(x.size() - 1, j + static_cast<std::size_t>(r));
        float m = x[lo];
        for (std::size_t k = lo + 1; k <= hi; ++k) m = std::max(m, x[k]);
        out[j] = m;
    }
    return out;
}

inline std::vector<float> window_min(std::span<const float> x, int r) {
    std::vector<float> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        std::size_t lo = j >= static_cast<std::size_t>(r) ? j - static_cast<std::size_t>(r) : 0;
        std::size_t hi = std::min(x.size() - 1, j + static_cast<std::size_t>(r));
        float m = x[lo];
        for (std::size_t k = lo + 1; k <= hi; ++k) m = std::min(m, x[k]);
        out[j] = m;
    }
    return out;
}

// Minimum warping cost by exhaustive path enumeration. Exponential; keep
// inputs tiny.
inline double dtw_exhaustive(std::span<const float> a, std::span<const float> b, int window) {
    struct Rec {
        std::span<const float> a, b;
        int r;
        double go(std::size_t i, std::size_t j) {
            if (i >= a.size() || j >= b.size()) return inf_();
            long long band = static_cast<long long>(i) - static_cast<long long>(j);
            if (band > r || band < -r) return inf_();
            double d = static_cast<double>(a[i]) - static_cast<double>(b[j]);
            double cost = d * d;
            if (i + 1 == a.size() && j + 1 == b.size()) return cost;
            double best = std::min({go(i + 1, j), go(i, j + 1), go(i + 1, j + 1)});
            return cost + best;
        }
        static double inf_() { return std::numeric_limits<double>::infinity(); }
    } rec{a, b, window};
    return std::sqrt(rec.go(0, 0));
}

// Plain sequential squared Euclidean, no blocking: an arithmetic-order
// independent cross-check (compare with a small tolerance).
inline double euclid_plain(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

inline std::vector<float> random_walk(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<float> out(n);
    double v = 0.0;
    for (auto& x : out) {
        v += gauss(rng);
        x = static_cast<float>(v);
    }
    return out;
}

inline tsidx::Dataset dataset_of(const std::vector<std::vector<float>>& rows) {
    tsidx::Dataset ds;
    ds.count = rows.size();
    ds.length = rows.empty() ? 0 : rows[0].size();
    ds.source_length = ds.length;
    for (const auto& r : rows) ds.values.insert(ds.values.end(), r.begin(), r.end());
    return ds;
}

inline tsidx::Dataset random_walk_dataset(std::size_t count, std::size_t length,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    tsidx::Dataset ds;
    ds.count = count;
    ds.length = length;
    ds.source_length = length;
    ds.values.reserve(count * length);
    for (std::size_t i = 0; i < count; ++i) {
        auto row = random_walk(length, rng);
        ds.values.insert(ds.values.end(), row.begin(), row.end());
    }
    return ds;
}

}  // namespace testutil
