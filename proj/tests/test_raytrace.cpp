#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rytov/berry.hpp"
#include "rytov/errors.hpp"
#include "rytov/raytrace.hpp"

using namespace rytov;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Closed-form duct spiral (see crit05): launch tangentially at radius R.
struct Helix {
    double omega, sin_theta, cos_theta, speed;
    Vec3 r0, p0;
};

Helix make_helix(double kappa, double radius) {
    Helix h;
    const double root = std::sqrt(1.0 + 0.5 * kappa * kappa * radius * radius);
    h.omega = kappa * root;
    h.sin_theta = kappa * radius / root;
    h.cos_theta = std::sqrt(1.0 - h.sin_theta * h.sin_theta);
    h.speed = root * root;
    h.r0 = {radius, 0.0, 0.0};
    h.p0 = {0.0, h.sin_theta, h.cos_theta};
    return h;
}

}  // namespace

TEST_CASE("ray rhs: homogeneous and linear-gradient hand checks") {
    const MediumModel flat = MediumModel::homogeneous();
    PhononState s{{2.0, -1.0, 3.0}, {0.0, 3.0, 4.0}, +1, 0.0, {}};
    const RayDerivative d = ray_rhs(s, flat, 1.0);
    CHECK(d.dp.norm() == 0.0);
    CHECK(d.dr.x == doctest::Approx(0.0));
    CHECK(d.dr.y == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(d.dr.z == doctest::Approx(0.8).epsilon(1e-15));

    const MediumModel gradient = MediumModel::linear_gradient({0.0, 0.0, 0.01});
    PhononState g{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};
    const RayDerivative dg = ray_rhs(g, gradient, 1.0);
    CHECK(dg.dp.x == 0.0);
    CHECK(dg.dp.y == 0.0);
    CHECK(dg.dp.z == doctest::Approx(-0.01).epsilon(1e-15));
    CHECK(dg.dr.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dg.dr.y == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(dg.dr.z == doctest::Approx(0.0));

    const RayDerivative classical = ray_rhs(g, gradient, 0.0);
    CHECK(classical.dr.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(classical.dr.y == 0.0);
    CHECK(classical.dr.z == 0.0);

    PhononState zero{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, +1, 0.0, {}};
    CHECK_THROWS_AS(ray_rhs(zero, flat, 1.0), ZeroMomentumError);
}

TEST_CASE("homogeneous medium: straight ray, empty accumulators") {
    const MediumModel flat = MediumModel::homogeneous();
    PhononState s{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};
    TraceConfig config;
    config.t_max = 10.0;
    const Trajectory traj = integrate(s, flat, config);

    CHECK(traj.terminated == TraceStatus::completed);
    const PhononState& f = traj.final_sample().state;
    CHECK(f.r.x == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(f.r.y) < 1e-12);
    CHECK(std::abs(f.r.z) < 1e-12);
    CHECK(f.gamma_acc == 0.0);
    CHECK(hall_shift(traj).norm() == 0.0);  // dp = 0 along the whole ray
    CHECK(traj.max_h_drift() < 1e-14);
}

TEST_CASE("constant-gradient medium bends classical rays into circles") {
    // For c = 1 + b z the horizontal momentum and H = c |p| are conserved, so
    // sin(theta)/c is constant along the ray and the path is a circular arc of
    // radius R = H / (b p_h) centered on the c = 0 plane z = -1/b.
    const double b = 0.05;
    const MediumModel m = MediumModel::linear_gradient({0.0, 0.0, b});
    TraceConfig config;
    config.hbar_scale = 0.0;
    config.t_max = 40.0;
    config.rel_tol = 1e-10;
    config.abs_tol = 1e-13;

    const Vec3 p0 = Vec3{1.0, 0.0, 0.8}.normalized();
    PhononState s{{0.0, 0.0, 0.0}, p0, +1, 0.0, {}};
    const Trajectory traj = integrate(s, m, config);

    const double h_const = transverse_speed(m, s.r) * s.p.norm();
    const double radius = h_const / (b * s.p.x);
    // center: perpendicular to the travel direction, on the c = 0 plane
    const Vec3 center{s.r.x + radius * p0.z, 0.0, -1.0 / b};
    CHECK(center.z == doctest::Approx(s.r.z - radius * p0.x).epsilon(1e-12));

    for (const auto& sample : traj.samples) {
        CHECK((sample.state.r - center).norm() == doctest::Approx(radius).epsilon(1e-8));
        CHECK(sample.state.p.y == 0.0);
        // Snell invariant: sin(theta)/c = p_h / H
        const double sin_theta = std::hypot(sample.state.p.x, sample.state.p.y) /
                                 sample.state.p.norm();
        const double c_here = transverse_speed(m, sample.state.r);
        CHECK(sin_theta / c_here == doctest::Approx(s.p.x / h_const).epsilon(1e-9));
    }
}

TEST_CASE("profile carrier does not touch the dynamics") {
    MediumModel by_speed = MediumModel::gaussian_lens(0.1, 1.0);
    MediumModel by_density = by_speed;
    by_density.carrier = ProfileCarrier::density;

    TraceConfig config;
    config.t_max = 10.0;
    PhononState s{{-5.0, 0.5, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};
    const Trajectory a = integrate(s, by_speed, config);
    const Trajectory b = integrate(s, by_density, config);
    REQUIRE(a.samples.size() == b.samples.size());
    const PhononState& fa = a.final_sample().state;
    const PhononState& fb = b.final_sample().state;
    CHECK(fa.r.x == fb.r.x);
    CHECK(fa.r.y == fb.r.y);
    CHECK(fa.p.x == fb.p.x);
    CHECK(fa.gamma_acc == fb.gamma_acc);
}

TEST_CASE("time reversal recovers the initial state") {
    const MediumModel lens = MediumModel::gaussian_lens(0.1, 1.0);
    TraceConfig config;
    config.t_max = 6.0;
    config.rel_tol = 1e-11;
    config.abs_tol = 1e-14;

    PhononState fwd{{-3.0, 0.4, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};
    const Trajectory out = integrate(fwd, lens, config);
    const PhononState mid = out.final_sample().state;

    // time reversal flips the momentum; helicity is even under it (both the
    // spin and the propagation direction reverse)
    PhononState back{mid.r, -mid.p, +1, 0.0, {}};
    const Trajectory ret = integrate(back, lens, config);
    const PhononState end = ret.final_sample().state;

    const double tol = 10.0 * config.rel_tol * 4.0;  // state scale ~ |r| <= 4
    CHECK((end.r - fwd.r).norm() < tol);
    CHECK((end.p + fwd.p).norm() < tol);
}

TEST_CASE("hall accumulator on the unit equatorial circle") {
    const int n = 20000;
    std::vector<Vec3> momenta;
    momenta.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double phi = kTwoPi * i / n;
        momenta.push_back({std::cos(phi), std::sin(phi), 0.0});
    }
    PhaseAccumulator acc(+1, 1.0, momenta.front());
    acc.accumulate(std::span<const Vec3>(momenta).subspan(1));
    CHECK(acc.hall().z == doctest::Approx(kTwoPi).epsilon(1e-7));
    CHECK(std::abs(acc.hall().x) < 1e-12);
    CHECK(std::abs(acc.hall().y) < 1e-12);
    CHECK(acc.max_axial_ratio() < 1e-12);

    // constant momentum: no increments at all
    PhaseAccumulator frozen(+1, 1.0, {1.0, 0.0, 0.0});
    for (int i = 0; i < 100; ++i) frozen.step({1.0, 0.0, 0.0});
    CHECK(frozen.hall().norm() == 0.0);
    CHECK(frozen.gamma() == 0.0);
}

TEST_CASE("duct spiral: one momentum revolution reproduces the cone angle") {
    const double kappa = 0.5, radius = 1.0;
    const Helix helix = make_helix(kappa, radius);
    const MediumModel duct = MediumModel::axial_duct(kappa);

    TraceConfig config;
    config.hbar_scale = 0.0;
    config.t_max = kTwoPi / helix.omega;
    config.rel_tol = 1e-11;
    config.abs_tol = 1e-13;
    config.max_step = 0.09 / helix.omega;  // keep extracted samples estimator-ready

    PhononState s{helix.r0, helix.p0, +1, 0.0, {}};
    const Trajectory traj = integrate(s, duct, config);
    CHECK(traj.terminated == TraceStatus::completed);

    const double gamma = traj.final_sample().state.gamma_acc;
    CHECK(gamma == doctest::Approx(kTwoPi * helix.cos_theta).epsilon(1e-7));
    CHECK(traj.max_h_drift() < 1e-8);

    // the ray stays on the cylinder and the momentum cone
    for (const auto& sample : traj.samples) {
        CHECK(std::hypot(sample.state.r.x, sample.state.r.y) ==
              doctest::Approx(radius).epsilon(1e-7));
        CHECK(sample.state.p.z / sample.state.p.norm() ==
              doctest::Approx(helix.cos_theta).epsilon(1e-8));
    }

    // consistency with the berry estimator on the extracted momentum path
    const MomentumPath path = traj.extract_momentum_path(/*closed=*/true, 1e-6);
    const PhaseResult li = rytov_line_integral(path, +1);
    CHECK(std::abs(li.gamma - gamma) < 1e-9);
}

TEST_CASE("H conservation over a long duct run at default tolerances") {
    const Helix helix = make_helix(0.5, 1.0);
    const MediumModel duct = MediumModel::axial_duct(0.5);
    TraceConfig config;
    config.hbar_scale = 0.0;
    config.t_max = 1000.0;
    config.output_stride = 50;

    PhononState s{helix.r0, helix.p0, +1, 0.0, {}};
    const Trajectory traj = integrate(s, duct, config);
    CHECK(traj.terminated == TraceStatus::completed);
    CHECK(traj.max_h_drift() < 1e-8);
}

TEST_CASE("classical limit: opposite helicities coincide") {
    Scenario scenario{MediumModel::gaussian_lens(0.1, 1.0), {-6.0, 0.8, 0.0}, {1.0, 0.0, 0.0}};
    TraceConfig config;
    config.hbar_scale = 0.0;
    config.t_max = 12.0;
    const SplittingResult split = helicity_splitting(scenario, config);
    for (const auto& [t, sep] : split.separation) {
        (void)t;
        CHECK(sep == 0.0);
    }
}

TEST_CASE("duct splitting after one revolution matches the cone formula") {
    const double kappa = 0.5, radius = 1.0;
    const Helix helix = make_helix(kappa, radius);
    Scenario scenario{MediumModel::axial_duct(kappa), helix.r0, helix.p0};

    TraceConfig config;
    config.hbar_scale = 1e-3;  // small enough that the cone stays unperturbed
    config.t_max = kTwoPi / helix.omega;
    config.rel_tol = 1e-11;
    config.abs_tol = 1e-13;

    const SplittingResult split = helicity_splitting(scenario, config);
    const double expected =
        2.0 * config.hbar_scale * kTwoPi * helix.sin_theta * helix.sin_theta;  // |p| = 1
    CHECK(split.separation.back().second == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("splitting grows linearly in hbar") {
    Scenario scenario{MediumModel::gaussian_lens(0.1, 1.0), {-6.0, 0.8, 0.0}, {1.0, 0.0, 0.0}};
    TraceConfig config;
    config.t_max = 12.0;
    config.rel_tol = 1e-10;
    config.abs_tol = 1e-13;

    config.hbar_scale = 1e-3;
    const SplittingResult fine = helicity_splitting(scenario, config);
    const double sep1 = fine.separation.back().second;
    config.hbar_scale = 2e-3;
    const double sep2 = helicity_splitting(scenario, config).separation.back().second;

    CHECK(sep1 > 0.0);
    CHECK(sep2 / sep1 == doctest::Approx(2.0).epsilon(1e-4));

    // separation equals twice the anomalous displacement to first order
    const double hall_mag = hall_shift(fine.plus).norm();
    CHECK(sep1 == doctest::Approx(2.0 * hall_mag).epsilon(1e-3));
}

TEST_CASE("tolerance halving stays inside the prior error estimate") {
    const Helix helix = make_helix(0.5, 1.0);
    const MediumModel duct = MediumModel::axial_duct(0.5);
    TraceConfig coarse;
    coarse.hbar_scale = 0.0;
    coarse.t_max = 30.0;
    coarse.rel_tol = 1e-8;
    coarse.abs_tol = 1e-11;

    TraceConfig fine = coarse;
    fine.rel_tol = 5e-9;

    PhononState s{helix.r0, helix.p0, +1, 0.0, {}};
    const Trajectory a = integrate(s, duct, coarse);
    const Trajectory b = integrate(s, duct, fine);
    const double dr = (a.final_sample().state.r - b.final_sample().state.r).norm();
    CHECK(dr <= a.error_estimate);
}

TEST_CASE("domain exit terminates gracefully") {
    const MediumModel flat = MediumModel::homogeneous();
    TraceConfig config;
    config.t_max = 10.0;
    config.bbox = BoundingBox{{-1.0, -1.0, -1.0}, {2.0, 1.0, 1.0}};

    PhononState s{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};
    const Trajectory traj = integrate(s, flat, config);
    CHECK(traj.terminated == TraceStatus::domain_exit);
    CHECK(traj.final_sample().t < 10.0);
    CHECK(traj.final_sample().state.r.x >= 2.0);

    PhononState outside{{5.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};
    CHECK_THROWS_AS(integrate(outside, flat, config), ValidationError);
}

TEST_CASE("config and state validation") {
    const MediumModel flat = MediumModel::homogeneous();
    PhononState s{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, +1, 0.0, {}};

    TraceConfig bad;
    bad.t_max = 0.0;
    CHECK_THROWS_AS(integrate(s, flat, bad), ValidationError);

    TraceConfig config;
    config.t_max = 1.0;
    PhononState zero{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, +1, 0.0, {}};
    CHECK_THROWS_AS(integrate(zero, flat, config), ZeroMomentumError);

    config.rel_tol = -1.0;
    CHECK_THROWS_AS(integrate(s, flat, config), ValidationError);
}
