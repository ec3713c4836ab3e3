#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rytov/medium.hpp"
#include "rytov/path.hpp"
#include "rytov/vec3.hpp"

namespace rytov {

/// Ray-tracing state: position, momentum, helicity, and the two quantities
/// accumulated along the trajectory (Rytov angle and anomalous displacement).
struct PhononState {
    Vec3 r;
    Vec3 p;
    int sigma = +1;
    double gamma_acc = 0.0;
    Vec3 hall_acc;
};

struct BoundingBox {
    Vec3 lo;
    Vec3 hi;

    bool contains(const Vec3& r) const {
        return r.x >= lo.x && r.x <= hi.x && r.y >= lo.y && r.y <= hi.y && r.z >= lo.z &&
               r.z <= hi.z;
    }
};

struct TraceConfig {
    double hbar_scale = 1.0;  // 0 gives the classical ray limit
    double t_max = 0.0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.0;        // 0: unlimited
    int output_stride = 1;        // sample decimation for trajectory emission
    double output_grid_dt = 0.0;  // >0: land exactly on multiples of this interval
    std::optional<BoundingBox> bbox;
};

enum class TraceStatus { completed, domain_exit, zero_momentum };

struct TrajectorySample {
    double t;
    PhononState state;
    double h_value;  // H(r, p) = c(r) |p| at this sample
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TraceStatus terminated = TraceStatus::completed;
    double error_estimate = 0.0;  // sum of embedded per-step error norms
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    double max_hall_axial_ratio = 0.0;  // max |dHall . p_mid| / (|dHall| |p_mid|)

    const TrajectorySample& final_sample() const { return samples.back(); }
    double max_h_drift() const;

    /// Momentum samples as an estimator-ready path. The closure tolerance is
    /// the caller's: integrated loops close only to integrator accuracy.
    MomentumPath extract_momentum_path(bool closed, double closure_tol = 1e-6) const;
};

struct RayDerivative {
    Vec3 dr;
    Vec3 dp;
};

/// Right-hand side of the helicity-dependent ray equations for the
/// dispersion H(r, p) = c(r) |p|:
///   dp/dt = -|p| grad c(r)
///   dr/dt = c(r) p_hat + sigma hbar (p x dp/dt) / |p|^3
/// The anomalous term uses the freshly computed dp/dt (explicit substitution),
/// exact to first order in hbar. hbar_scale = 0 recovers classical geometric
/// acoustics.
RayDerivative ray_rhs(const PhononState& state, const MediumModel& medium, double hbar_scale);

/// Adaptive Dormand-Prince 5(4) integration to t_max. The Rytov angle and
/// the Hall displacement advance with the same accepted steps as the state:
///   gamma += sigma * mean(cos theta) * dphi          (phi unwrapped)
///   hall  += sigma * hbar * (p_mid x dp) / |p_mid|^3
Trajectory integrate(const PhononState& state0, const MediumModel& medium,
                     const TraceConfig& config);

/// Accumulated anomalous displacement at the end of the trajectory.
Vec3 hall_shift(const Trajectory& traj);

struct Scenario {
    MediumModel medium;
    Vec3 r0;
    Vec3 p0;
};

struct SplittingResult {
    Trajectory plus;
    Trajectory minus;
    std::vector<std::pair<double, double>> separation;  // (t, |r+ - r-|)
};

/// Traces sigma = +1 and sigma = -1 from identical initial conditions and
/// reports their spatial separation over a shared output grid.
SplittingResult helicity_splitting(const Scenario& scenario, const TraceConfig& config);

/// Step-wise accumulator shared by the integrator and by tests that feed it
/// analytic momentum paths. Tracks the unwrapped azimuth, the Rytov angle sum
/// and the Hall displacement sum over consecutive momentum samples.
class PhaseAccumulator {
public:
    PhaseAccumulator(int sigma, double hbar_scale, const Vec3& p0);

    void step(const Vec3& p_next);
    void accumulate(std::span<const Vec3> momenta);

    double gamma() const { return gamma_; }
    const Vec3& hall() const { return hall_; }
    double phi_unwrapped() const { return phi_unwrapped_; }
    double max_axial_ratio() const { return max_axial_ratio_; }

private:
    int sigma_;
    double hbar_;
    Vec3 p_prev_;
    double phi_prev_;
    bool phi_valid_;
    double gamma_ = 0.0;
    Vec3 hall_;
    double phi_unwrapped_ = 0.0;
    double max_axial_ratio_ = 0.0;
};

}  // namespace rytov
