#include <cmath>
#include <random>

#include "doctest.h"
#include "rytov/errors.hpp"
#include "rytov/medium.hpp"

using namespace rytov;

namespace {

// Independent oracle: 4th-order central differences of transverse_speed.
// Step ~1e-3 balances truncation against rounding at ~1e-12 absolute error.
Vec3 fd_speed_gradient(const MediumModel& m, const Vec3& r) {
    const auto partial = [&](int axis) {
        const double h = 1e-3 * (1.0 + r.norm());
        const auto at = [&](double offset) {
            Vec3 q = r;
            (axis == 0 ? q.x : axis == 1 ? q.y : q.z) += offset;
            return transverse_speed(m, q);
        };
        return (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
    };
    return {partial(0), partial(1), partial(2)};
}

}  // namespace

TEST_CASE("homogeneous medium: constant speed everywhere") {
    const MediumModel m = MediumModel::homogeneous(1.0, 1.0);
    CHECK(transverse_speed(m, {5.0, -2.0, 7.0}) == 1.0);
    CHECK(transverse_speed(m, {0.0, 0.0, 0.0}) == 1.0);
    const Vec3 g = speed_gradient(m, {3.0, 1.0, -4.0});
    CHECK(g.x == 0.0);
    CHECK(g.y == 0.0);
    CHECK(g.z == 0.0);
}

TEST_CASE("linear gradient: c = 1 + 0.01 z") {
    const MediumModel m = MediumModel::linear_gradient({0.0, 0.0, 0.01});
    CHECK(transverse_speed(m, {0.0, 0.0, 10.0}) == doctest::Approx(1.1).epsilon(1e-15));
    const Vec3 g = speed_gradient(m, {4.0, -1.0, 2.0});
    CHECK(g.x == 0.0);
    CHECK(g.y == 0.0);
    CHECK(g.z == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("gaussian lens: peak depression and analytic gradient") {
    const MediumModel m = MediumModel::gaussian_lens(0.1, 1.0);
    CHECK(transverse_speed(m, {0.0, 0.0, 0.0}) == doctest::Approx(0.9).epsilon(1e-15));
    const Vec3 g = speed_gradient(m, {1.0, 0.0, 0.0});
    CHECK(g.x == doctest::Approx(0.2 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(g.y == 0.0);
    CHECK(g.z == 0.0);
}

TEST_CASE("speed is sqrt(mu/rho) at the scale level") {
    const MediumModel m = MediumModel::homogeneous(4.0, 9.0);
    CHECK(transverse_speed(m, {1.0, 2.0, 3.0}) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("profile carriers: same speed field, different material split") {
    const Vec3 r{0.3, -0.2, 0.9};
    MediumModel by_speed = MediumModel::linear_gradient({0.0, 0.0, 0.05});
    MediumModel by_rho = by_speed;
    by_rho.carrier = ProfileCarrier::density;
    MediumModel by_mu = by_speed;
    by_mu.carrier = ProfileCarrier::shear_modulus;

    const double c = transverse_speed(by_speed, r);
    CHECK(transverse_speed(by_rho, r) == c);
    CHECK(transverse_speed(by_mu, r) == c);
    CHECK(std::sqrt(shear_modulus(by_rho, r) / density(by_rho, r)) ==
          doctest::Approx(c).epsilon(1e-14));
    CHECK(std::sqrt(shear_modulus(by_mu, r) / density(by_mu, r)) ==
          doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("analytic gradients match finite differences at random points") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);

    const MediumModel models[] = {
        MediumModel::homogeneous(),
        MediumModel::linear_gradient({0.02, -0.01, 0.03}),
        MediumModel::gaussian_lens(0.1, 1.0),
        MediumModel::axial_duct(0.5),
    };

    for (const MediumModel& m : models) {
        for (int i = 0; i < 1000; ++i) {
            const Vec3 r{coord(rng), coord(rng), coord(rng)};
            const Vec3 analytic = speed_gradient(m, r);
            const Vec3 numeric = fd_speed_gradient(m, r);
            const double err = (analytic - numeric).norm();
            const double scale = std::max(analytic.norm(), 1e-3);
            CHECK(err / scale < 1e-6);
        }
    }
}

TEST_CASE("adiabaticity diagnostic") {
    const MediumModel gradient = MediumModel::linear_gradient({0.0, 0.0, 0.01});
    CHECK(adiabaticity(gradient, {0, 0, 0}, 100.0) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(adiabaticity(gradient, {0, 0, 0}, 0.1) == doctest::Approx(0.1).epsilon(1e-12));

    const MediumModel flat = MediumModel::homogeneous();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        CHECK(adiabaticity(flat, {coord(rng), coord(rng), coord(rng)}, 1.0) == 0.0);
    }

    CHECK_THROWS_AS(adiabaticity(flat, {0, 0, 0}, 0.0), DomainError);
    CHECK_THROWS_AS(adiabaticity(flat, {0, 0, 0}, -1.0), DomainError);
}

TEST_CASE("domain errors where the profile kills the speed") {
    const MediumModel gradient = MediumModel::linear_gradient({0.0, 0.0, 0.01});
    CHECK_THROWS_AS(transverse_speed(gradient, {0.0, 0.0, -150.0}), DomainError);

    const MediumModel deep_lens = MediumModel::gaussian_lens(1.5, 1.0);
    CHECK_THROWS_AS(transverse_speed(deep_lens, {0.0, 0.0, 0.0}), DomainError);
    // far from the lens center the same model is fine
    CHECK(transverse_speed(deep_lens, {10.0, 0.0, 0.0}) > 0.0);

    CHECK_THROWS_AS(MediumModel::homogeneous(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(MediumModel::homogeneous(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(MediumModel::gaussian_lens(0.1, 0.0), DomainError);
}

TEST_CASE("repeated queries are bit-identical") {
    const MediumModel m = MediumModel::gaussian_lens(0.1, 1.3, 1.1, 0.9);
    const Vec3 r{0.37, -0.21, 0.55};
    const double a = transverse_speed(m, r);
    const double b = transverse_speed(m, r);
    CHECK(a == b);
    const Vec3 g1 = speed_gradient(m, r);
    const Vec3 g2 = speed_gradient(m, r);
    CHECK(g1.x == g2.x);
    CHECK(g1.y == g2.y);
    CHECK(g1.z == g2.z);
}
