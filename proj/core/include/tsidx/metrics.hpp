#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tsidx/breakpoints.hpp"
#include "tsidx/sax.hpp"

namespace tsidx {

// Sentinel returned by the abandoning kernels. Infinity compares greater
// than any cutoff, so callers can feed results straight into comparisons.
inline constexpr double kAbandoned = std::numeric_limits<double>::infinity();

enum class MeasureKind { euclidean, dtw };

struct Measure {
    MeasureKind kind = MeasureKind::euclidean;
    int window = 0;  // Sakoe-Chiba band half-width, dtw only

    static Measure ed() { return {MeasureKind::euclidean, 0}; }
    static Measure dtw(int window) { return {MeasureKind::dtw, window}; }
};

// Euclidean distance, summed left to right in blocks of eight points so the
// abandoning and non-abandoning paths produce bit-identical sums.
double euclidean(std::span<const float> a, std::span<const float> b);

// Abandoning variant: returns kAbandoned as soon as the running squared sum
// exceeds abandon_at^2, checked after the block containing the crossing.
double euclidean(std::span<const float> a, std::span<const float> b, double abandon_at);

// Lower bound on euclidean(q, s) for any series s whose iSAX word is `word`:
// per segment, the gap between the query's PAA mean and the word's region,
// scaled by sqrt(n/w). n is the series length.
double mindist_paa_isax(std::span<const double> query_paa, SaxWordView word, std::size_t n);

// Dynamic time warping distance constrained to |i - j| <= window, with
// squared point costs and a final square root. 0 <= window < n.
double dtw(std::span<const float> a, std::span<const float> b, int window);

// Abandoning variant: gives up when every cell of a DP row exceeds
// abandon_at^2 (no alignment through that row can recover).
double dtw(std::span<const float> a, std::span<const float> b, int window, double abandon_at);

// Warping envelope of a query: upper[i] / lower[i] are the max / min of the
// query over [i-window, i+window], plus the PAA of both bands for node-level
// bounds.
struct Envelope {
    std::vector<float> upper;
    std::vector<float> lower;
    std::vector<double> upper_paa;
    std::vector<double> lower_paa;
    int window = 0;
};

Envelope keogh_envelope(std::span<const float> query, int window, int w);

// LB_Keogh: distance from a candidate to the envelope bands. Lower-bounds
// dtw(query, candidate, window) for the envelope's window.
double lb_keogh(const Envelope& env, std::span<const float> candidate);

// Envelope-vs-region lower bound for DTW: per segment, the gap between the
// PAA band [lower_paa, upper_paa] and the word's region, scaled by
// sqrt(n/w). Lower-bounds dtw(query, s, window) for any s under `word`.
double mindist_envelope_isax(const Envelope& env, SaxWordView word, std::size_t n);

}  // namespace tsidx
