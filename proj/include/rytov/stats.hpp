#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rytov {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased (n-1) sample variance
    double std_error_mean = 0.0;
    double skewness = 0.0;         // g1 = m3 / m2^(3/2)
    double excess_kurtosis = 0.0;  // g2 = m4 / m2^2 - 3
};

/// Two-pass central-moment statistics, summed in index order so results are
/// reproducible bit for bit.
Moments compute_moments(std::span<const double> values);

struct Histogram {
    std::vector<double> edges;         // bins + 1 entries
    std::vector<std::uint64_t> counts; // sums to the sample count
};

/// Fixed-width histogram over mean +- 6 std; outliers land in the edge bins
/// so the counts always total n.
Histogram make_histogram(std::span<const double> values, int bins);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace rytov
