#pragma once

#include <span>
#include <vector>

namespace tsidx {

// Quantile function of the standard normal distribution. Rational
// approximation (Acklam) refined by one Newton step; the result is accurate
// to well below 1e-12 over (0, 1).
double inverse_normal_cdf(double p);

// CDF of the standard normal distribution.
double normal_cdf(double x);

struct RegionBounds {
    double lower;
    double upper;
};

// Gaussian quantile thresholds for every power-of-two cardinality up to
// 2^max_bits. A cardinality-c table holds the c-1 points splitting N(0,1)
// into c equiprobable regions. Immutable after construction, so shared
// concurrent reads are safe.
class Breakpoints {
  public:
    explicit Breakpoints(int max_bits);

    int max_bits() const { return max_bits_; }

    // The c-1 thresholds for cardinality c. Throws std::invalid_argument if
    // c is not a power of two in [2, 2^max_bits].
    std::span<const double> thresholds(unsigned cardinality) const;

    // Value interval covered by `symbol` at cardinality 2^bits. The lowest
    // region extends to -inf and the highest to +inf. A value equal to a
    // threshold belongs to the region above it.
    RegionBounds region(unsigned symbol, int bits) const;

    // Shared 8-bit table (cardinalities 2..256), built on first use.
    static const Breakpoints& standard();

  private:
    int max_bits_;
    // padded_[b-1] holds {-inf, thresholds..., +inf} for cardinality 2^b,
    // so region lookup is two adjacent reads.
    std::vector<std::vector<double>> padded_;
};

// Convenience wrappers over the shared 8-bit table.
std::span<const double> breakpoints_for(unsigned cardinality);
RegionBounds region_bounds(unsigned symbol, int card_bits);

}  // namespace tsidx
