#include "rytov/medium.hpp"

#include <cmath>
#include <string>

#include "rytov/errors.hpp"

namespace rytov {

namespace {

void check_scales(double rho0, double mu0) {
    if (!(rho0 > 0.0)) throw DomainError("rho0 must be positive, got " + std::to_string(rho0));
    if (!(mu0 > 0.0)) throw DomainError("mu0 must be positive, got " + std::to_string(mu0));
}

struct Profile {
    double f;
    Vec3 grad_f;
};

Profile evaluate_profile(const MediumModel& m, const Vec3& r) {
    switch (m.kind) {
        case MediumKind::homogeneous:
            return {1.0, {}};
        case MediumKind::linear_gradient:
            return {1.0 + dot(m.gradient, r), m.gradient};
        case MediumKind::gaussian_lens: {
            const double w2 = m.lens_width * m.lens_width;
            const double e = std::exp(-r.norm2() / w2);
            return {1.0 - m.lens_amplitude * e, r * (2.0 * m.lens_amplitude * e / w2)};
        }
        case MediumKind::axial_duct: {
            const double k2 = m.duct_curvature * m.duct_curvature;
            return {1.0 + 0.5 * k2 * (r.x * r.x + r.y * r.y), {k2 * r.x, k2 * r.y, 0.0}};
        }
    }
    throw DomainError("unreachable medium kind");
}

Profile checked_profile(const MediumModel& m, const Vec3& r) {
    const Profile p = evaluate_profile(m, r);
    if (!(p.f > 0.0)) {
        throw DomainError("medium profile yields non-positive speed at (" + std::to_string(r.x) +
                          ", " + std::to_string(r.y) + ", " + std::to_string(r.z) + ")");
    }
    return p;
}

}  // namespace

MediumModel MediumModel::homogeneous(double rho0, double mu0) {
    check_scales(rho0, mu0);
    MediumModel m;
    m.kind = MediumKind::homogeneous;
    m.rho0 = rho0;
    m.mu0 = mu0;
    return m;
}

MediumModel MediumModel::linear_gradient(const Vec3& g, double rho0, double mu0) {
    check_scales(rho0, mu0);
    MediumModel m;
    m.kind = MediumKind::linear_gradient;
    m.gradient = g;
    m.rho0 = rho0;
    m.mu0 = mu0;
    return m;
}

MediumModel MediumModel::gaussian_lens(double a, double w, double rho0, double mu0) {
    check_scales(rho0, mu0);
    if (!(w > 0.0)) throw DomainError("lens width must be positive, got " + std::to_string(w));
    MediumModel m;
    m.kind = MediumKind::gaussian_lens;
    m.lens_amplitude = a;
    m.lens_width = w;
    m.rho0 = rho0;
    m.mu0 = mu0;
    return m;
}

MediumModel MediumModel::axial_duct(double kappa, double rho0, double mu0) {
    check_scales(rho0, mu0);
    if (!(kappa >= 0.0))
        throw DomainError("duct curvature must be non-negative, got " + std::to_string(kappa));
    MediumModel m;
    m.kind = MediumKind::axial_duct;
    m.duct_curvature = kappa;
    m.rho0 = rho0;
    m.mu0 = mu0;
    return m;
}

double transverse_speed(const MediumModel& medium, const Vec3& r) {
    return std::sqrt(medium.mu0 / medium.rho0) * checked_profile(medium, r).f;
}

Vec3 speed_gradient(const MediumModel& medium, const Vec3& r) {
    return checked_profile(medium, r).grad_f * std::sqrt(medium.mu0 / medium.rho0);
}

SpeedSample speed_and_gradient(const MediumModel& medium, const Vec3& r) {
    const double c0 = std::sqrt(medium.mu0 / medium.rho0);
    const Profile p = checked_profile(medium, r);
    return {c0 * p.f, p.grad_f * c0};
}

double density(const MediumModel& medium, const Vec3& r) {
    const Profile p = checked_profile(medium, r);
    if (medium.carrier == ProfileCarrier::density) return medium.rho0 / (p.f * p.f);
    return medium.rho0;
}

double shear_modulus(const MediumModel& medium, const Vec3& r) {
    const Profile p = checked_profile(medium, r);
    if (medium.carrier == ProfileCarrier::shear_modulus) return medium.mu0 * p.f * p.f;
    if (medium.carrier == ProfileCarrier::density) return medium.mu0;
    // speed-carried profile: keep rho fixed, fold the profile into mu
    return medium.mu0 * p.f * p.f;
}

double adiabaticity(const MediumModel& medium, const Vec3& r, double p_mag, double hbar_scale) {
    if (!(p_mag > 0.0))
        throw DomainError("adiabaticity requires p_mag > 0, got " + std::to_string(p_mag));
    if (!(hbar_scale > 0.0))
        throw DomainError("adiabaticity requires hbar_scale > 0, got " +
                          std::to_string(hbar_scale));
    const SpeedSample s = speed_and_gradient(medium, r);
    const double k = p_mag / hbar_scale;
    return s.gradient.norm() / (s.c * k);
}

}  // namespace rytov
