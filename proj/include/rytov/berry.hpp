#pragma once

#include <span>

#include "rytov/path.hpp"
#include "rytov/vec3.hpp"

namespace rytov {

/// Knobs shared by the phase estimators.
struct EstimatorOptions {
    /// Samples whose transverse momentum p_xy falls below axis_guard_rel*|p|
    /// sit on the gauge string for the line integral and get an explicit
    /// AxisSingularityError instead of a silent blowup.
    double axis_guard_rel = 1e-12;

    /// Maximum geodesic angle between consecutive direction samples. Coarser
    /// paths raise ResolutionError. Raise this only for polygon-style paths
    /// whose segments are meant as exact geodesics.
    double max_angular_step = 0.1;
};

enum class PhaseMethod { line_integral, solid_angle, polarization_transport };

struct PhaseResult {
    double gamma = 0.0;  // radians, winding-aware (not reduced mod 2*pi)
    PhaseMethod method = PhaseMethod::line_integral;
    long winding = 0;                  // azimuthal turns about the polar axis
    double closure_correction = 0.0;   // phase removed for non-cyclic paths
    double closure_arc_length = 0.0;   // geodesic angle appended to close an open path
};

/// Berry connection A(p) in the gauge with the string along the polar axis:
/// A = p_z / (|p| (p_x^2 + p_y^2)) * (-p_y, p_x, 0).
/// Throws AxisSingularityError within the axis guard; callers then either
/// rotate the gauge (rotate_gauge) or use the solid-angle estimator.
Vec3 connection(const Vec3& p, double axis_guard_rel = 1e-12);

/// Berry curvature for helicity sigma: the monopole field -sigma p / |p|^3.
/// Regular everywhere off the origin.
Vec3 curvature(const Vec3& p, int sigma);

/// Rytov rotation angle as the discrete line integral of the connection:
/// gamma = sigma * sum of cos(theta) dphi with continuous phi unwrapping.
/// Requires a closed path clear of the axis guard.
PhaseResult rytov_line_integral(const MomentumPath& path, int sigma,
                                const EstimatorOptions& opts = {});

/// Gauge-invariant evaluation: gamma = sigma (2 pi w - Omega) where Omega is
/// the signed solid angle enclosed by the direction curve (fan triangulation,
/// L'Huilier's formula per triangle) and w the azimuthal winding. Open paths
/// are closed by the geodesic arc between endpoint directions, which carries
/// zero phase of its own; the arc length is reported.
PhaseResult rytov_solid_angle(const MomentumPath& path, int sigma,
                              const EstimatorOptions& opts = {});

/// Independent oracle for the phase estimators: parallel-transports a real
/// polarization vector e (kept transverse to the direction) around a closed
/// path and returns the net rotation of e about the initial direction,
/// in (-pi, pi]. Equals the line-integral gamma at sigma=+1 modulo 2*pi.
double transport_polarization(const MomentumPath& path, const Vec3& e0,
                              const EstimatorOptions& opts = {});

/// Rigid rotation of all samples by the minimal rotation taking `axis` to +z,
/// used as the gauge fallback when a path crosses the polar axis. The solid
/// angle is invariant under the rotation; the line integral changes only by
/// multiples of 2*pi. Throws StillSingularError if the rotated path still
/// touches the axis guard.
MomentumPath rotate_gauge(const MomentumPath& path, const Vec3& axis,
                          const EstimatorOptions& opts = {});

/// Signed solid angle of a closed spherical polygon (vertices need not be
/// unit length; directions are used). Positive for loops traversed
/// counterclockwise as seen from the region they enclose. Exact for polygons
/// regardless of edge length, up to rounding.
double spherical_polygon_solid_angle(std::span<const Vec3> vertices);

/// Numerical flux of curvature(., sigma) through an origin-centered sphere,
/// via a Gauss-Legendre (zenith) x trapezoid (azimuth) product rule.
double monopole_flux(int sigma, double radius, int n_theta = 24, int n_phi = 48);

}  // namespace rytov
