#include "tsidx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace tsidx {

namespace {

constexpr std::size_t kBlock = 8;

// Shared squared-distance core. Both entry points run the same blocked
// left-to-right accumulation, so an un-abandoned call and an abandoning call
// that survives produce bit-identical sums.
template <bool Abandoning>
double squared_l2(const float* a, const float* b, std::size_t n, double cutoff) {
    double sum = 0.0;
    std::size_t i = 0;
    for (; i + kBlock <= n; i += kBlock) {
        double block = 0.0;
        for (std::size_t j = i; j < i + kBlock; ++j) {
            double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
            block += d * d;
        }
        sum += block;
        if (Abandoning && sum > cutoff) return kAbandoned;
    }
    if (i < n) {
        double block = 0.0;
        for (; i < n; ++i) {
            double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
            block += d * d;
        }
        sum += block;
        if (Abandoning && sum > cutoff) return kAbandoned;
    }
    return sum;
}

void check_same_length(std::span<const float> a, std::span<const float> b, const char* who) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument(std::string(who) + ": series must be nonempty and equal length");
}

// Interval-to-interval gap: zero when [lo, hi] and the region overlap.
inline double region_gap(double lo, double hi, const RegionBounds& r) {
    if (hi < r.lower) return r.lower - hi;
    if (lo > r.upper) return lo - r.upper;
    return 0.0;
}

double mindist_bands(std::span<const double> lower_band, std::span<const double> upper_band,
                     SaxWordView word, std::size_t n, const char* who) {
    const std::size_t w = lower_band.size();
    if (word.symbols.size() != w || word.card_bits.size() != w)
        throw std::invalid_argument(std::string(who) + ": word does not match segment count");
    if (n == 0 || n % w != 0)
        throw std::invalid_argument(std::string(who) + ": n must be a nonzero multiple of w");
    const Breakpoints& bp = Breakpoints::standard();
    double sum = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        const int bits = word.card_bits[i];
        const unsigned prefix = word.symbols[i] >> (kSymbolBits - bits);
        const double d = region_gap(lower_band[i], upper_band[i], bp.region(prefix, bits));
        sum += d * d;
    }
    return std::sqrt(sum * (static_cast<double>(n) / static_cast<double>(w)));
}

// Sliding min/max over a centered window, monotonic deque of indices.
template <typename Better>
void sliding_extremum(std::span<const float> x, int r, Better better, std::vector<float>& out) {
    const std::size_t n = x.size();
    out.resize(n);
    std::deque<std::size_t> q;
    for (std::size_t arriving = 0; arriving < n + static_cast<std::size_t>(r); ++arriving) {
        if (arriving < n) {
            while (!q.empty() && !better(x[q.back()], x[arriving])) q.pop_back();
            q.push_back(arriving);
        }
        // Window centered at `center` is fully admitted once center + r has
        // arrived (or the array has ended).
        if (arriving + 1 < static_cast<std::size_t>(r) + 1) continue;
        std::size_t center = arriving - static_cast<std::size_t>(r);
        if (center >= n) break;
        while (q.front() + static_cast<std::size_t>(r) < center) q.pop_front();
        out[center] = x[q.front()];
    }
}

}  // namespace

double euclidean(std::span<const float> a, std::span<const float> b) {
    check_same_length(a, b, "euclidean");
    return std::sqrt(squared_l2<false>(a.data(), b.data(), a.size(), 0.0));
}

double euclidean(std::span<const float> a, std::span<const float> b, double abandon_at) {
    check_same_length(a, b, "euclidean");
    double sq = squared_l2<true>(a.data(), b.data(), a.size(), abandon_at * abandon_at);
    return sq == kAbandoned ? kAbandoned : std::sqrt(sq);
}

double mindist_paa_isax(std::span<const double> query_paa, SaxWordView word, std::size_t n) {
    return mindist_bands(query_paa, query_paa, word, n, "mindist_paa_isax");
}

namespace {

template <bool Abandoning>
double dtw_impl(std::span<const float> a, std::span<const float> b, int window, double cutoff) {
    const std::size_t n = a.size();
    const auto r = static_cast<std::size_t>(window);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Two rolling rows over the Sakoe-Chiba band; row i holds columns
    // [i-r, i+r] clamped to [0, n).
    const std::size_t width = 2 * r + 1;
    std::vector<double> prev(width, inf), cur(width, inf);
    auto lo_of = [&](std::size_t i) { return i > r ? i - r : 0; };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = lo_of(i);
        const std::size_t hi = std::min(n - 1, i + r);
        const std::size_t prev_lo = i > 0 ? lo_of(i - 1) : 0;
        double row_min = inf;
        for (std::size_t j = lo; j <= hi; ++j) {
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                best = inf;
                if (i > 0 && j >= prev_lo && j <= std::min(n - 1, (i - 1) + r)) {
                    best = prev[j - prev_lo];                       // up
                    if (j > prev_lo) best = std::min(best, prev[j - 1 - prev_lo]);  // diagonal
                } else if (i > 0 && j - 1 >= prev_lo && j - 1 <= (i - 1) + r) {
                    best = prev[j - 1 - prev_lo];                   // diagonal only
                }
                if (j > lo) best = std::min(best, cur[j - 1 - lo]);  // left
            }
            double d = static_cast<double>(a[i]) - static_cast<double>(b[j]);
            double cell = best + d * d;
            cur[j - lo] = cell;
            if (cell < row_min) row_min = cell;
        }
        if (Abandoning && row_min > cutoff) return kAbandoned;
        std::swap(prev, cur);
    }
    return prev[(n - 1) - lo_of(n - 1)];
}

}  // namespace

double dtw(std::span<const float> a, std::span<const float> b, int window) {
    check_same_length(a, b, "dtw");
    if (window < 0 || static_cast<std::size_t>(window) >= a.size())
        throw std::invalid_argument("dtw: window must be in [0, n)");
    return std::sqrt(dtw_impl<false>(a, b, window, 0.0));
}

double dtw(std::span<const float> a, std::span<const float> b, int window, double abandon_at) {
    check_same_length(a, b, "dtw");
    if (window < 0 || static_cast<std::size_t>(window) >= a.size())
        throw std::invalid_argument("dtw: window must be in [0, n)");
    double sq = dtw_impl<true>(a, b, window, abandon_at * abandon_at);
    return sq == kAbandoned ? kAbandoned : std::sqrt(sq);
}

Envelope keogh_envelope(std::span<const float> query, int window, int w) {
    if (query.empty()) throw std::invalid_argument("keogh_envelope: empty query");
    if (window < 0 || static_cast<std::size_t>(window) >= query.size())
        throw std::invalid_argument("keogh_envelope: window must be in [0, n)");
    Envelope env;
    env.window = window;
    sliding_extremum(query, window, [](float keep, float in) { return keep > in; }, env.upper);
    sliding_extremum(query, window, [](float keep, float in) { return keep < in; }, env.lower);
    env.upper_paa = paa(env.upper, w);
    env.lower_paa = paa(env.lower, w);
    return env;
}

double lb_keogh(const Envelope& env, std::span<const float> candidate) {
    if (candidate.size() != env.upper.size())
        throw std::invalid_argument("lb_keogh: candidate length does not match envelope");
    double sum = 0.0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        const double c = candidate[i];
        double d = 0.0;
        if (c > env.upper[i])
            d = c - env.upper[i];
        else if (c < env.lower[i])
            d = env.lower[i] - c;
        sum += d * d;
    }
    return std::sqrt(sum);
}

double mindist_envelope_isax(const Envelope& env, SaxWordView word, std::size_t n) {
    return mindist_bands(env.lower_paa, env.upper_paa, word, n, "mindist_envelope_isax");
}

}  // namespace tsidx
