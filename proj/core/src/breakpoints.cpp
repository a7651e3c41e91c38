#include "tsidx/breakpoints.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tsidx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Acklam's rational approximation to the normal quantile, ~1e-9 relative
// error on its own; the Newton step below pushes that to ~1e-15.
double acklam(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kSqrt2Pi = 2.506628274631000502;

}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("inverse_normal_cdf: p must be in (0, 1)");
    double x = acklam(p);
    // One Newton step against the exact CDF.
    double err = normal_cdf(x) - p;
    x -= err * kSqrt2Pi * std::exp(0.5 * x * x);
    return x;
}

Breakpoints::Breakpoints(int max_bits) : max_bits_(max_bits) {
    if (max_bits < 1 || max_bits > 8)
        throw std::invalid_argument("Breakpoints: max_bits must be in [1, 8]");
    padded_.resize(static_cast<std::size_t>(max_bits));
    for (int bits = 1; bits <= max_bits; ++bits) {
        const unsigned c = 1u << bits;
        auto& row = padded_[static_cast<std::size_t>(bits - 1)];
        row.assign(c + 1, 0.0);
        row.front() = -kInf;
        row.back() = kInf;
        // Thresholds at i/c for i in [1, c). Computing the lower half and
        // mirroring keeps the table exactly symmetric (the median is 0).
        for (unsigned i = 1; i <= c / 2; ++i) {
            double beta = inverse_normal_cdf(static_cast<double>(i) / c);
            row[i] = beta;
            row[c - i] = -beta;
        }
    }
}

std::span<const double> Breakpoints::thresholds(unsigned cardinality) const {
    if (cardinality < 2 || (cardinality & (cardinality - 1)) != 0 ||
        cardinality > (1u << max_bits_))
        throw std::invalid_argument("Breakpoints: cardinality " + std::to_string(cardinality) +
                                    " is not a power of two in [2, 2^" +
                                    std::to_string(max_bits_) + "]");
    int bits = std::countr_zero(cardinality);
    const auto& row = padded_[static_cast<std::size_t>(bits - 1)];
    return {row.data() + 1, cardinality - 1};
}

RegionBounds Breakpoints::region(unsigned symbol, int bits) const {
    if (bits < 1 || bits > max_bits_)
        throw std::invalid_argument("Breakpoints: region bits must be in [1, " +
                                    std::to_string(max_bits_) + "]");
    if (symbol >= (1u << bits))
        throw std::invalid_argument("Breakpoints: symbol " + std::to_string(symbol) +
                                    " out of range for " + std::to_string(bits) + " bits");
    const auto& row = padded_[static_cast<std::size_t>(bits - 1)];
    return {row[symbol], row[symbol + 1]};
}

const Breakpoints& Breakpoints::standard() {
    static const Breakpoints table(8);
    return table;
}

std::span<const double> breakpoints_for(unsigned cardinality) {
    return Breakpoints::standard().thresholds(cardinality);
}

RegionBounds region_bounds(unsigned symbol, int card_bits) {
    return Breakpoints::standard().region(symbol, card_bits);
}

}  // namespace tsidx
