#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "rytov/berry.hpp"
#include "rytov/errors.hpp"

using namespace rytov;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_diff(double a, double b) { return std::remainder(a - b, kTwoPi); }

// Independent oracle: 4th-order central-difference curl of the connection,
// with the stencil scaled by the distance to the gauge string.
Vec3 fd_curl(const Vec3& p) {
    const double h = 0.01 * std::hypot(p.x, p.y);
    const auto component = [&](const Vec3& q, int c) {
        const Vec3 a = connection(q);
        return c == 0 ? a.x : c == 1 ? a.y : a.z;
    };
    const auto partial = [&](int axis, int c) {
        const auto at = [&](double offset) {
            Vec3 q = p;
            (axis == 0 ? q.x : axis == 1 ? q.y : q.z) += offset;
            return component(q, c);
        };
        return (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
    };
    return {partial(1, 2) - partial(2, 1), partial(2, 0) - partial(0, 2),
            partial(0, 1) - partial(1, 0)};
}

// Smooth random loop on the sphere: low-order Fourier wobble around a tilted
// circle, sampled densely and kept clear of both poles.
MomentumPath random_fourier_loop(std::mt19937_64& rng, int n_samples) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double theta_c = 1.0 + u01(rng);  // [1, 2] subset of (0, pi)
    double a[3], b[3], alpha[3], beta[3];
    for (int k = 0; k < 3; ++k) {
        a[k] = 0.16 * (u01(rng) - 0.5);
        b[k] = 0.16 * (u01(rng) - 0.5);
        alpha[k] = kTwoPi * u01(rng);
        beta[k] = kTwoPi * u01(rng);
    }
    const double p_mag = 0.5 + u01(rng);

    std::vector<PathSample> samples;
    samples.reserve(n_samples + 1);
    for (int i = 0; i <= n_samples; ++i) {
        const double u = static_cast<double>(i) / n_samples;
        double theta = theta_c;
        double phi = kTwoPi * u;
        for (int k = 0; k < 3; ++k) {
            theta += a[k] * std::cos(kTwoPi * (k + 1) * u + alpha[k]);
            phi += b[k] * std::sin(kTwoPi * (k + 1) * u + beta[k]);
        }
        samples.push_back({u, Vec3{std::sin(theta) * std::cos(phi),
                                   std::sin(theta) * std::sin(phi), std::cos(theta)} *
                                  p_mag});
    }
    samples.back().p = samples.front().p;  // bit-exact closure
    return MomentumPath(std::move(samples), /*closed=*/true);
}

}  // namespace

TEST_CASE("connection: gauge formula and axis guard") {
    const Vec3 a = connection({1.0, 0.0, 0.0});
    CHECK(a.x == 0.0);
    CHECK(a.y == 0.0);
    CHECK(a.z == 0.0);

    const Vec3 b = connection({1.0, 0.0, 1.0});
    CHECK(b.x == doctest::Approx(0.0));
    CHECK(b.y == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(b.z == 0.0);

    CHECK_THROWS_AS(connection({0.0, 0.0, 1.0}), AxisSingularityError);
    CHECK_THROWS_AS(connection({1e-13, 0.0, 1.0}), AxisSingularityError);
    CHECK_NOTHROW(connection({1e-11, 0.0, 1.0}));
    CHECK_THROWS_AS(connection({0.0, 0.0, 0.0}), ZeroMomentumError);
}

TEST_CASE("curvature: monopole field of charge -sigma") {
    const Vec3 plus = curvature({0.0, 0.0, 2.0}, +1);
    CHECK(plus.x == 0.0);
    CHECK(plus.y == 0.0);
    CHECK(plus.z == doctest::Approx(-0.25).epsilon(1e-15));

    const Vec3 minus = curvature({0.0, 0.0, 2.0}, -1);
    CHECK(minus.z == doctest::Approx(0.25).epsilon(1e-15));

    CHECK_THROWS_AS(curvature({0.0, 0.0, 0.0}, +1), ZeroMomentumError);
    CHECK_THROWS_AS(curvature({1.0, 0.0, 0.0}, 2), DomainError);
}

TEST_CASE("monopole flux through origin-centered spheres") {
    for (double radius : {0.5, 1.0, 2.5}) {
        for (int sigma : {+1, -1}) {
            const double flux = monopole_flux(sigma, radius);
            CHECK(std::abs(flux - (-4.0 * kPi * sigma)) / (4.0 * kPi) < 1e-9);
        }
    }
}

TEST_CASE("finite-difference curl matches the monopole curvature") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double mag = 0.5 + 1.5 * u01(rng);
        const double z = -0.95 + 1.9 * u01(rng);
        const double phi = kTwoPi * u01(rng);
        const double s = std::sqrt(1.0 - z * z);
        const Vec3 p = Vec3{s * std::cos(phi), s * std::sin(phi), z} * mag;
        const Vec3 expected = curvature(p, +1);
        const double rel = (fd_curl(p) - expected).norm() / expected.norm();
        CHECK(rel < 1e-5);
    }
}

TEST_CASE("line integral on constant-zenith circles") {
    const MomentumPath equator = MomentumPath::circle(kPi / 2, 1.0, 2000);
    const PhaseResult eq = rytov_line_integral(equator, +1);
    CHECK(std::abs(eq.gamma) < 1e-12);
    CHECK(eq.winding == 1);
    CHECK(eq.closure_correction == 0.0);

    const MomentumPath third = MomentumPath::circle(kPi / 3, 1.0, 2000);
    const PhaseResult li = rytov_line_integral(third, +1);
    CHECK(li.gamma == doctest::Approx(kPi).epsilon(1e-12));

    const PhaseResult li_minus = rytov_line_integral(third, -1);
    CHECK(li_minus.gamma == -li.gamma);  // antisymmetry is exact

    const MomentumPath doubled = MomentumPath::circle(kPi / 3, 1.0, 4000, 2);
    const PhaseResult two = rytov_line_integral(doubled, +1);
    CHECK(two.winding == 2);
    CHECK(two.gamma == doctest::Approx(2.0 * kPi).epsilon(1e-12));

    const MomentumPath reversed = MomentumPath::circle(kPi / 3, 1.0, 2000, -1);
    const PhaseResult rev = rytov_line_integral(reversed, +1);
    CHECK(rev.winding == -1);
    CHECK(std::abs(wrap_diff(rev.gamma, -li.gamma)) < 1e-8);
}

TEST_CASE("solid angle on circles agrees with caps") {
    const MomentumPath equator = MomentumPath::circle(kPi / 2, 1.0, 2000);
    const PhaseResult eq = rytov_solid_angle(equator, +1);
    CHECK(eq.winding == 1);
    // gamma = 2 pi w - Omega with Omega = 2 pi for the equator
    CHECK(std::abs(eq.gamma) < 1e-6);

    const MomentumPath third = MomentumPath::circle(kPi / 3, 1.0, 20000);
    const PhaseResult sa = rytov_solid_angle(third, +1);
    CHECK(sa.gamma == doctest::Approx(kPi).epsilon(1e-7));
    const double omega = kTwoPi * sa.winding - sa.gamma;
    CHECK(omega == doctest::Approx(kPi).epsilon(1e-7));

    CHECK(rytov_solid_angle(third, -1).gamma == -sa.gamma);
}

TEST_CASE("both estimators stay on the same branch for winding loops") {
    // raw (unwrapped) agreement, not just modulo 2 pi
    for (int w : {1, 2, -1, -2}) {
        for (double theta : {kPi / 3, 2.0}) {
            const MomentumPath path = MomentumPath::circle(theta, 1.0, 20000 * std::abs(w), w);
            const double li = rytov_line_integral(path, +1).gamma;
            const double sa = rytov_solid_angle(path, +1).gamma;
            const double expected = kTwoPi * w * std::cos(theta);
            CHECK(std::abs(li - expected) < 1e-9);
            CHECK(std::abs(sa - expected) < 1e-6);
            CHECK(std::abs(li - sa) < 1e-6);
        }
    }
}

TEST_CASE("octant geodesic triangle encloses pi/2") {
    const std::vector<Vec3> octant{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(spherical_polygon_solid_angle(octant) == doctest::Approx(kPi / 2).epsilon(1e-12));

    // through the estimator: 3-sample open path, geodesic-closed; the
    // segments are exact geodesics so the resolution guard is lifted
    std::vector<PathSample> samples{{0.0, {1, 0, 0}}, {1.0, {0, 1, 0}}, {2.0, {0, 0, 1}}};
    const MomentumPath path(samples, /*closed=*/false);
    EstimatorOptions opts;
    opts.max_angular_step = 2.0;
    const PhaseResult r = rytov_solid_angle(path, +1, opts);
    const double omega = kTwoPi * r.winding - r.gamma;
    CHECK(omega == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(r.closure_correction == 0.0);
    CHECK(r.closure_arc_length == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("polarization transport on circles") {
    const MomentumPath equator = MomentumPath::circle(kPi / 2, 1.0, 2000);
    const Vec3 e0{0.0, 0.0, 1.0};  // transverse to the equatorial start direction
    CHECK(std::abs(wrap_diff(transport_polarization(equator, e0), 0.0)) < 1e-9);

    const MomentumPath third = MomentumPath::circle(kPi / 3, 1.0, 20000);
    const Vec3 u0 = third.samples().front().p.normalized();
    const Vec3 t0 = cross(Vec3{0, 0, 1}, u0).normalized();
    const double angle = transport_polarization(third, t0);
    const double li = rytov_line_integral(third, +1).gamma;
    CHECK(std::abs(wrap_diff(angle, li)) < 1e-7);

    CHECK_THROWS_AS(transport_polarization(third, u0), NotTransverseError);
    CHECK_THROWS_AS(transport_polarization(third, t0 * 1.5), NotTransverseError);
}

TEST_CASE("degenerate out-and-back path transports trivially") {
    const Vec3 a{1.0, 0.0, 0.0};
    const Vec3 b{std::cos(0.05), std::sin(0.05), 0.0};
    const MomentumPath path({{0.0, a}, {1.0, b}, {2.0, a}}, /*closed=*/true);
    CHECK(std::abs(transport_polarization(path, {0.0, 0.0, 1.0})) < 1e-12);
    const PhaseResult sa = rytov_solid_angle(path, +1);
    CHECK(std::abs(sa.gamma) < 1e-12);
}

TEST_CASE("cross-method agreement on random smooth loops") {
    std::mt19937_64 rng(20260808);
    for (int trial = 0; trial < 100; ++trial) {
        const MomentumPath path = random_fourier_loop(rng, 32768);
        const PhaseResult li = rytov_line_integral(path, +1);
        const PhaseResult sa = rytov_solid_angle(path, +1);
        const Vec3 u0 = path.samples().front().p.normalized();
        Vec3 e0 = cross(Vec3{0, 0, 1}, u0);
        e0 = (e0 - u0 * dot(e0, u0)).normalized();
        const double pt = transport_polarization(path, e0);

        CHECK(std::abs(wrap_diff(li.gamma, sa.gamma)) < 1e-6);
        CHECK(std::abs(wrap_diff(li.gamma, pt)) < 1e-6);
    }
}

TEST_CASE("reparametrization leaves the estimators untouched") {
    const MomentumPath path = MomentumPath::circle(kPi / 3, 1.0, 3000);
    std::vector<PathSample> warped = path.samples();
    for (auto& s : warped) s.t = s.t * s.t * s.t + 2.0 * s.t;  // strictly monotone
    const MomentumPath repar(warped, /*closed=*/true);

    CHECK(rytov_line_integral(path, +1).gamma == rytov_line_integral(repar, +1).gamma);
    CHECK(rytov_solid_angle(path, +1).gamma == rytov_solid_angle(repar, +1).gamma);
}

TEST_CASE("orientation reversal negates gamma") {
    std::mt19937_64 rng(55);
    const MomentumPath path = random_fourier_loop(rng, 8192);
    std::vector<PathSample> rev = path.samples();
    std::reverse(rev.begin(), rev.end());
    for (std::size_t i = 0; i < rev.size(); ++i) rev[i].t = static_cast<double>(i);
    const MomentumPath reversed(rev, /*closed=*/true);

    const double fwd_li = rytov_line_integral(path, +1).gamma;
    const double bwd_li = rytov_line_integral(reversed, +1).gamma;
    CHECK(std::abs(wrap_diff(fwd_li, -bwd_li)) < 1e-8);

    const double fwd_sa = rytov_solid_angle(path, +1).gamma;
    const double bwd_sa = rytov_solid_angle(reversed, +1).gamma;
    CHECK(std::abs(wrap_diff(fwd_sa, -bwd_sa)) < 1e-8);
}

TEST_CASE("gauge rotation: invariance and the polar-axis fallback") {
    const MomentumPath equator = MomentumPath::circle(kPi / 2, 1.0, 2000);
    const MomentumPath same = rotate_gauge(equator, {0.0, 0.0, 1.0});
    CHECK(same.samples()[17].p.x == equator.samples()[17].p.x);
    CHECK(same.samples()[17].p.z == equator.samples()[17].p.z);

    const MomentumPath third = MomentumPath::circle(kPi / 3, 1.0, 20000);
    const MomentumPath tilted = rotate_gauge(third, {0.0, 1.0, 0.0});
    const PhaseResult sa_orig = rytov_solid_angle(third, +1);
    const PhaseResult sa_rot = rytov_solid_angle(tilted, +1);
    CHECK(std::abs(wrap_diff(sa_rot.gamma, sa_orig.gamma)) < 1e-8);
    const PhaseResult li_rot = rytov_line_integral(tilted, +1);
    CHECK(std::abs(wrap_diff(li_rot.gamma, sa_orig.gamma)) < 1e-6);

    // great circle through both poles: the line integral is blocked until the
    // gauge is rotated so the curve becomes an equator
    const int n = 2000;  // divisible by 4: samples land exactly on the poles
    std::vector<PathSample> meridian;
    for (int i = 0; i <= n; ++i) {
        const double phi = kTwoPi * i / n;
        meridian.push_back({static_cast<double>(i), {0.0, std::cos(phi), std::sin(phi)}});
    }
    const MomentumPath polar_path(meridian, /*closed=*/true);
    CHECK_THROWS_AS(rytov_line_integral(polar_path, +1), AxisSingularityError);

    const PhaseResult sa_polar = rytov_solid_angle(polar_path, +1);
    const MomentumPath cleared = rotate_gauge(polar_path, {1.0, 0.0, 0.0});
    const PhaseResult li_cleared = rytov_line_integral(cleared, +1);
    CHECK(std::abs(wrap_diff(li_cleared.gamma, sa_polar.gamma)) < 1e-6);

    // rotating about an axis inside the path plane cannot clear the string
    CHECK_THROWS_AS(rotate_gauge(polar_path, {0.0, 1.0, 0.0}), StillSingularError);
    CHECK_THROWS_AS(rotate_gauge(polar_path, {0.0, 2.0, 0.0}), DomainError);
}

TEST_CASE("path validation and estimator guards") {
    // too coarse for the default resolution limit
    CHECK_THROWS_AS(rytov_line_integral(MomentumPath::circle(kPi / 3, 1.0, 30), +1),
                    ResolutionError);
    CHECK_THROWS_AS(rytov_solid_angle(MomentumPath::circle(kPi / 3, 1.0, 30), +1),
                    ResolutionError);

    // closed flag with mismatched endpoints
    std::vector<PathSample> broken = MomentumPath::circle(kPi / 3, 1.0, 2000).samples();
    broken.back().p = Vec3{std::sin(kPi / 3) * std::cos(0.001), std::sin(kPi / 3) * std::sin(0.001),
                           std::cos(kPi / 3)};
    const MomentumPath mismatched(broken, /*closed=*/true);
    CHECK_THROWS_AS(rytov_line_integral(mismatched, +1), NotClosedError);
    CHECK_THROWS_AS(rytov_solid_angle(mismatched, +1), NotClosedError);

    // open paths: the line integral refuses, the solid angle closes the gap
    std::vector<PathSample> arc;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double phi = 0.5 * kPi * i / n;  // quarter turn on the pi/3 cone
        arc.push_back({static_cast<double>(i),
                       {std::sin(kPi / 3) * std::cos(phi), std::sin(kPi / 3) * std::sin(phi),
                        std::cos(kPi / 3)}});
    }
    const MomentumPath open_path(arc, /*closed=*/false);
    CHECK_THROWS_AS(rytov_line_integral(open_path, +1), NotClosedError);
    const PhaseResult sa = rytov_solid_angle(open_path, +1);
    CHECK(sa.closure_arc_length > 0.0);
    CHECK(sa.closure_correction == 0.0);

    // antipodal consecutive samples are rejected even with a loose step limit
    std::vector<PathSample> anti{{0.0, {1, 0, 0}}, {1.0, {-1, 0, 0}}, {2.0, {1, 0, 0}}};
    EstimatorOptions loose;
    loose.max_angular_step = 4.0;
    CHECK_THROWS_AS(rytov_solid_angle(MomentumPath(anti, false), +1, loose),
                    AntipodalSegmentError);

    CHECK_THROWS_AS(MomentumPath({{0.0, {1, 0, 0}}, {1.0, {0, 1, 0}}}, false), ValidationError);
    CHECK_THROWS_AS(MomentumPath({{0.0, {1, 0, 0}}, {0.0, {0, 1, 0}}, {1.0, {0, 0, 1}}}, false),
                    ValidationError);
    CHECK_THROWS_AS(MomentumPath({{0.0, {1, 0, 0}}, {1.0, {0, 0, 0}}, {2.0, {0, 0, 1}}}, false),
                    ZeroMomentumError);
}
