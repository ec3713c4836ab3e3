#pragma once

#include "rytov/vec3.hpp"

namespace rytov {

enum class MediumKind { homogeneous, linear_gradient, gaussian_lens, axial_duct };

/// Which material parameter carries the spatial profile. All three choices
/// realize the same transverse speed field c(r) = sqrt(mu/rho); they differ
/// only in what density() and shear_modulus() report.
enum class ProfileCarrier { speed, density, shear_modulus };

/// Analytic inhomogeneous isotropic medium. The profile factor f(r) is
/// dimensionless and kind-specific; the transverse sound speed is
/// c(r) = sqrt(mu0/rho0) * f(r).
///
///   homogeneous      f = 1
///   linear_gradient  f = 1 + g.r
///   gaussian_lens    f = 1 - a exp(-|r|^2 / w^2)
///   axial_duct       f = 1 + kappa^2 (x^2 + y^2) / 2
///
/// The duct profile guides rays into spirals whose momentum direction traces
/// a constant-zenith cone (see raytrace tests for the closed-form helix).
struct MediumModel {
    MediumKind kind = MediumKind::homogeneous;
    ProfileCarrier carrier = ProfileCarrier::speed;
    double rho0 = 1.0;  // mass-density scale
    double mu0 = 1.0;   // shear-modulus scale

    Vec3 gradient;                // linear_gradient: g, units 1/length
    double lens_amplitude = 0.0;  // gaussian_lens: a, dimensionless
    double lens_width = 1.0;      // gaussian_lens: w, length
    double duct_curvature = 0.0;  // axial_duct: kappa, 1/length

    static MediumModel homogeneous(double rho0 = 1.0, double mu0 = 1.0);
    static MediumModel linear_gradient(const Vec3& g, double rho0 = 1.0, double mu0 = 1.0);
    static MediumModel gaussian_lens(double a, double w, double rho0 = 1.0, double mu0 = 1.0);
    static MediumModel axial_duct(double kappa, double rho0 = 1.0, double mu0 = 1.0);
};

struct SpeedSample {
    double c;       // transverse speed at the query point
    Vec3 gradient;  // exact analytic grad c
};

/// Transverse (shear) sound speed c(r). Throws DomainError where the profile
/// would make c non-positive.
double transverse_speed(const MediumModel& medium, const Vec3& r);

/// Exact analytic gradient of c(r).
Vec3 speed_gradient(const MediumModel& medium, const Vec3& r);

/// Speed and gradient in one profile evaluation (the ray tracer's hot path).
SpeedSample speed_and_gradient(const MediumModel& medium, const Vec3& r);

double density(const MediumModel& medium, const Vec3& r);
double shear_modulus(const MediumModel& medium, const Vec3& r);

/// Adiabaticity diagnostic: the fractional change of c over one local
/// wavelength, eps = |grad c| / (c k) with k = p_mag / hbar_scale.
/// Polarization transport is trustworthy only while eps stays small
/// (the CLI warns above a configurable threshold, default 1e-2).
double adiabaticity(const MediumModel& medium, const Vec3& r, double p_mag,
                    double hbar_scale = 1.0);

}  // namespace rytov
