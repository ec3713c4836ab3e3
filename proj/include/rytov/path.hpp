#pragma once

#include <cstddef>
#include <vector>

#include "rytov/vec3.hpp"

namespace rytov {

struct PathSample {
    double t;
    Vec3 p;
};

/// Time-parametrized sampled momentum curve p(t), the domain of all phase
/// estimators. Immutable after construction. Construction enforces at least
/// three samples, strictly increasing t and |p| > 0 everywhere; the cyclic
/// closure check (first/last unit vector within closure_tol) is applied by
/// the estimators that require it.
class MomentumPath {
public:
    MomentumPath(std::vector<PathSample> samples, bool closed, double closure_tol = 1e-9);

    const std::vector<PathSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool closed() const { return closed_; }
    double closure_tol() const { return closure_tol_; }

    /// Angular distance between the first and last unit momentum vectors.
    double endpoint_gap() const;

    /// Constant-zenith circle at angle theta from +z, traversed with uniform
    /// azimuthal rate over [0, period]; `windings` full turns (sign selects
    /// orientation). The last sample duplicates the first, closing the loop.
    static MomentumPath circle(double theta, double p_mag, int samples, int windings = 1,
                               double phase0 = 0.0, double period = 1.0);

private:
    std::vector<PathSample> samples_;
    bool closed_;
    double closure_tol_;
};

}  // namespace rytov
