#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rytov/philox.hpp"
#include "rytov/stats.hpp"
#include "rytov/vec3.hpp"

namespace rytov {

/// Noiseless cyclic momentum trajectory: constant magnitude p0, zenith angle
/// theta0 (constant, or sampled uniformly over one period and interpolated),
/// and uniform azimuthal advance phi0(t) = 2 pi t / T.
struct PrescribedPath {
    double p0_mag = 1.0;
    double theta0 = 0.0;
    double period = 0.0;
    std::vector<double> theta0_series;  // optional; overrides the constant

    void validate() const;
    double theta_at(double t) const;
    Vec3 p0_at(double t) const;

    /// Uniform-in-time average of (sin theta0 / p0)^2 over one period.
    double mean_sin2_over_p2() const;
};

/// White-noise model: each momentum component receives an independent
/// Gaussian increment of variance 2D/dt per grid node (the standard
/// regularization of <N_i(t) N_j(t')> = 2D delta(t-t') delta_ij).
struct NoiseModel {
    double intensity = 0.0;  // D, momentum^2 * time
    std::uint64_t seed = 1;
    double dt = 0.0;

    void validate() const;
};

/// Cursor over one realization's noise steps.
class NoiseStream {
public:
    NoiseStream(const NoiseModel& model, std::uint64_t realization_index);

    Vec3 at(std::uint64_t node) const;
    Vec3 next() { return at(cursor_++); }

private:
    GaussianStream gaussians_;
    double amplitude_;
    std::uint64_t cursor_ = 0;
};

/// One node's noise vector, advancing the stream.
Vec3 sample_noise_step(const NoiseModel& model, NoiseStream& stream);

/// All node values of realization `index` on the grid t_k = k dt, k = 0..M
/// with M = T/dt (T must be an integer multiple of dt).
std::vector<Vec3> sample_realization(const NoiseModel& model, const PrescribedPath& path,
                                     std::uint64_t index);

/// Rytov-angle deviation over one period, exact form:
/// dGamma = (2 pi / T) integral of (cos theta - cos theta0) dt, with
/// cos theta = (p0 + N)_z / |p0 + N|, trapezoid rule on the noise grid.
/// Nodes where the perturbed momentum exceeds 0.3 p0 in magnitude are counted
/// into *excursions when provided (the linearization premise is strained
/// there; evaluation still completes).
double delta_gamma_exact(const PrescribedPath& path, std::span<const Vec3> noise,
                         std::uint64_t* excursions = nullptr);

/// Linearized form, exactly linear in the realization:
/// dGamma = (2 pi / T) integral of (N_z / p0 - (p0z / p0^3) p0 . N) dt.
double delta_gamma_linearized(const PrescribedPath& path, std::span<const Vec3> noise);

/// Closed-form prediction for the variance of the linearized deviation:
/// (8 pi^2 D / T) * time-average of (sin theta0 / p0)^2.
double variance_prediction(const PrescribedPath& path, double intensity, double period);

enum class DeltaGammaEstimator { exact, linearized };

struct EnsembleSummary {
    std::uint64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double std_error_mean = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    Histogram histogram;
    double predicted_variance = 0.0;
    std::uint64_t amplitude_excursions = 0;  // realizations with |N| > 0.3 p0 somewhere
};

struct EnsembleOptions {
    int threads = 0;  // 0: hardware concurrency
    int histogram_bins = 61;
};

/// n independent realizations on per-realization streams keyed by
/// (model.seed, index). Bit-identical for fixed inputs regardless of thread
/// count: realizations land in an indexed buffer and the reduction runs in
/// index order. Optionally exports the raw deviations.
EnsembleSummary run_ensemble(const PrescribedPath& path, const NoiseModel& model, std::uint64_t n,
                             DeltaGammaEstimator estimator, const EnsembleOptions& options = {},
                             std::vector<double>* deltas_out = nullptr);

struct PairedDeltas {
    std::vector<double> exact;
    std::vector<double> linearized;
    std::uint64_t amplitude_excursions = 0;
};

/// Both estimators evaluated on shared realizations, for consistency studies.
PairedDeltas paired_deltas(const PrescribedPath& path, const NoiseModel& model, std::uint64_t n,
                           const EnsembleOptions& options = {});

}  // namespace rytov
