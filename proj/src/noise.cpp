#include "rytov/noise.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "rytov/errors.hpp"

namespace rytov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t grid_intervals(const PrescribedPath& path, double dt) {
    const double ratio = path.period / dt;
    const auto m = static_cast<std::uint64_t>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
        throw ValidationError("period must be an integer multiple of dt (T/dt = " +
                              std::to_string(ratio) + ")");
    return m;
}

int resolve_threads(int requested, std::uint64_t n) {
    int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return static_cast<int>(std::min<std::uint64_t>(t, n));
}

/// Runs fn(index) for index in [0, n) over a static partition.
template <typename Fn>
void parallel_indexed(std::uint64_t n, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w) {
        const std::uint64_t lo = n * w / threads;
        const std::uint64_t hi = n * (w + 1) / threads;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::uint64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void PrescribedPath::validate() const {
    if (!(p0_mag > 0.0)) throw ValidationError("prescribed path needs p0_mag > 0");
    if (!(period > 0.0)) throw ValidationError("prescribed path needs a positive period");
    const auto check_theta = [](double th) {
        if (!(th > 0.0) || !(th < std::numbers::pi))
            throw ValidationError("theta0 must lie strictly inside (0, pi), got " +
                                  std::to_string(th));
    };
    if (theta0_series.empty()) {
        check_theta(theta0);
    } else {
        if (theta0_series.size() < 2)
            throw ValidationError("sampled theta0 needs at least 2 samples");
        for (double th : theta0_series) check_theta(th);
    }
}

double PrescribedPath::theta_at(double t) const {
    if (theta0_series.empty()) return theta0;
    const double u = std::clamp(t / period, 0.0, 1.0) * (theta0_series.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(u), theta0_series.size() - 2);
    const double w = u - static_cast<double>(i);
    return theta0_series[i] * (1.0 - w) + theta0_series[i + 1] * w;
}

Vec3 PrescribedPath::p0_at(double t) const {
    const double th = theta_at(t);
    const double phi = kTwoPi * t / period;
    return {p0_mag * std::sin(th) * std::cos(phi), p0_mag * std::sin(th) * std::sin(phi),
            p0_mag * std::cos(th)};
}

double PrescribedPath::mean_sin2_over_p2() const {
    if (theta0_series.empty()) {
        const double s = std::sin(theta0);
        return s * s / (p0_mag * p0_mag);
    }
    // trapezoid mean over the uniform sample grid
    double sum = 0.0;
    const std::size_t n = theta0_series.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sin(theta0_series[i]);
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        sum += w * s * s;
    }
    return sum / (static_cast<double>(n - 1) * p0_mag * p0_mag);
}

void NoiseModel::validate() const {
    if (!(intensity >= 0.0)) throw ValidationError("noise intensity D must be non-negative");
    if (!(dt > 0.0)) throw ValidationError("noise step dt must be positive");
}

NoiseStream::NoiseStream(const NoiseModel& model, std::uint64_t realization_index)
    : gaussians_(model.seed, realization_index),
      amplitude_(std::sqrt(2.0 * model.intensity / model.dt)) {
    model.validate();
}

Vec3 NoiseStream::at(std::uint64_t node) const { return gaussians_.normal3(node) * amplitude_; }

Vec3 sample_noise_step(const NoiseModel& model, NoiseStream& stream) {
    (void)model;
    return stream.next();
}

std::vector<Vec3> sample_realization(const NoiseModel& model, const PrescribedPath& path,
                                     std::uint64_t index) {
    path.validate();
    model.validate();
    const std::uint64_t m = grid_intervals(path, model.dt);
    NoiseStream stream(model, index);
    std::vector<Vec3> noise(m + 1);
    for (std::uint64_t k = 0; k <= m; ++k) noise[k] = stream.at(k);
    return noise;
}

double delta_gamma_exact(const PrescribedPath& path, std::span<const Vec3> noise,
                         std::uint64_t* excursions) {
    path.validate();
    if (noise.size() < 2) throw ValidationError("realization needs at least 2 nodes");
    const std::size_t m = noise.size() - 1;
    const double dt = path.period / static_cast<double>(m);
    const double guard = 0.3 * path.p0_mag;

    bool strained = false;
    double sum = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        const double t = dt * static_cast<double>(k);
        const Vec3 p0 = path.p0_at(t);
        const Vec3 p = p0 + noise[k];
        const double p_norm = p.norm();
        if (p_norm <= 1e-12 * path.p0_mag)
            throw DegenerateMomentumError("perturbed momentum vanished at node " +
                                          std::to_string(k));
        if (noise[k].norm() > guard) strained = true;
        const double integrand = p.z / p_norm - p0.z / path.p0_mag;
        sum += (k == 0 || k == m) ? 0.5 * integrand : integrand;
    }
    if (strained && excursions) *excursions += 1;
    return kTwoPi / path.period * sum * dt;
}

double delta_gamma_linearized(const PrescribedPath& path, std::span<const Vec3> noise) {
    path.validate();
    if (noise.size() < 2) throw ValidationError("realization needs at least 2 nodes");
    const std::size_t m = noise.size() - 1;
    const double dt = path.period / static_cast<double>(m);
    const double p0 = path.p0_mag;
    const double inv_p0 = 1.0 / p0;
    const double inv_p03 = inv_p0 * inv_p0 * inv_p0;

    double sum = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        const double t = dt * static_cast<double>(k);
        const Vec3 p0_vec = path.p0_at(t);
        const double integrand = noise[k].z * inv_p0 - p0_vec.z * inv_p03 * dot(p0_vec, noise[k]);
        sum += (k == 0 || k == m) ? 0.5 * integrand : integrand;
    }
    return kTwoPi / path.period * sum * dt;
}

double variance_prediction(const PrescribedPath& path, double intensity, double period) {
    path.validate();
    if (!(intensity >= 0.0)) throw ValidationError("noise intensity D must be non-negative");
    if (!(period > 0.0)) throw ValidationError("period must be positive");
    return 8.0 * std::numbers::pi * std::numbers::pi * intensity / period *
           path.mean_sin2_over_p2();
}

EnsembleSummary run_ensemble(const PrescribedPath& path, const NoiseModel& model, std::uint64_t n,
                             DeltaGammaEstimator estimator, const EnsembleOptions& options,
                             std::vector<double>* deltas_out) {
    path.validate();
    model.validate();
    if (n < 2) throw ValidationError("ensemble needs n >= 2 realizations");
    const std::uint64_t m = grid_intervals(path, model.dt);

    std::vector<double> deltas(n);
    std::vector<std::uint8_t> strained(n, 0);
    const int threads = resolve_threads(options.threads, n);

    parallel_indexed(n, threads, [&](std::uint64_t i) {
        NoiseStream stream(model, i);
        std::vector<Vec3> noise(m + 1);
        for (std::uint64_t k = 0; k <= m; ++k) noise[k] = stream.at(k);
        try {
            if (estimator == DeltaGammaEstimator::exact) {
                std::uint64_t exc = 0;
                deltas[i] = delta_gamma_exact(path, noise, &exc);
                strained[i] = exc > 0 ? 1 : 0;
            } else {
                deltas[i] = delta_gamma_linearized(path, noise);
            }
        } catch (const EnsembleError&) {
            throw;
        } catch (const Error& e) {
            throw EnsembleError(i, e.what());
        }
    });

    EnsembleSummary summary;
    summary.n = n;
    const Moments mom = compute_moments(deltas);
    summary.mean = mom.mean;
    summary.variance = mom.variance;
    summary.std_error_mean = mom.std_error_mean;
    summary.skewness = mom.skewness;
    summary.excess_kurtosis = mom.excess_kurtosis;
    summary.histogram = make_histogram(deltas, options.histogram_bins);
    summary.predicted_variance = variance_prediction(path, model.intensity, path.period);
    for (std::uint64_t i = 0; i < n; ++i) summary.amplitude_excursions += strained[i];

    if (deltas_out) *deltas_out = std::move(deltas);
    return summary;
}

PairedDeltas paired_deltas(const PrescribedPath& path, const NoiseModel& model, std::uint64_t n,
                           const EnsembleOptions& options) {
    path.validate();
    model.validate();
    if (n < 2) throw ValidationError("paired evaluation needs n >= 2 realizations");
    const std::uint64_t m = grid_intervals(path, model.dt);

    PairedDeltas out;
    out.exact.resize(n);
    out.linearized.resize(n);
    std::vector<std::uint8_t> strained(n, 0);
    const int threads = resolve_threads(options.threads, n);

    parallel_indexed(n, threads, [&](std::uint64_t i) {
        NoiseStream stream(model, i);
        std::vector<Vec3> noise(m + 1);
        for (std::uint64_t k = 0; k <= m; ++k) noise[k] = stream.at(k);
        try {
            std::uint64_t exc = 0;
            out.exact[i] = delta_gamma_exact(path, noise, &exc);
            strained[i] = exc > 0 ? 1 : 0;
            out.linearized[i] = delta_gamma_linearized(path, noise);
        } catch (const Error& e) {
            throw EnsembleError(i, e.what());
        }
    });

    for (std::uint64_t i = 0; i < n; ++i) out.amplitude_excursions += strained[i];
    return out;
}

}  // namespace rytov
