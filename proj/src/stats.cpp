#include "rytov/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rytov/errors.hpp"

namespace rytov {

Moments compute_moments(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw ValidationError("moments need at least 2 samples");

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    Moments out;
    out.mean = mean;
    out.variance = m2 * n / (n - 1.0);
    out.std_error_mean = std::sqrt(out.variance / n);
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

Histogram make_histogram(std::span<const double> values, int bins) {
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    if (values.empty()) throw ValidationError("histogram needs samples");

    const Moments m = compute_moments(values);
    const double sd = std::sqrt(m.variance);
    const double half = sd > 0.0 ? 6.0 * sd : 1.0;
    const double lo = m.mean - half;
    const double hi = m.mean + half;
    const double width = (hi - lo) / bins;

    Histogram h;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + width * i;
    h.counts.assign(bins, 0);
    for (double v : values) {
        int idx = static_cast<int>(std::floor((v - lo) / width));
        idx = std::clamp(idx, 0, bins - 1);  // outliers go to the edge bins
        h.counts[idx] += 1;
    }
    return h;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ValidationError("linear fit needs matching x/y arrays with >= 2 points");
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw ValidationError("linear fit with degenerate x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

}  // namespace rytov
