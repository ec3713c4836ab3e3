#include <string>

#include "doctest.h"
#include "rytov/config.hpp"
#include "rytov/errors.hpp"

using namespace rytov;

namespace {

const char* kMinimalTrace = R"(
[medium]
kind = homogeneous

[trace]
r0 = 0,0,0
p0 = 1,0,0
t_max = 10
)";

}  // namespace

TEST_CASE("minimal trace config: defaults applied and logged") {
    const RunConfig config = parse_config(kMinimalTrace, Command::trace);
    REQUIRE(config.medium.has_value());
    REQUIRE(config.trace.has_value());
    CHECK(config.medium->kind == MediumKind::homogeneous);
    CHECK(config.trace->integ.t_max == 10.0);
    CHECK(config.trace->integ.rel_tol == 1e-9);
    CHECK(config.trace->integ.abs_tol == 1e-12);
    CHECK(config.trace->sigma == 1);
    CHECK(config.seed == 1);
    CHECK(!config.applied_defaults.empty());

    bool logged_rel_tol = false;
    for (const auto& d : config.applied_defaults)
        if (d.find("rel_tol") != std::string::npos) logged_rel_tol = true;
    CHECK(logged_rel_tol);
}

TEST_CASE("unknown keys are rejected with a nearest-key suggestion") {
    const std::string text = R"(
[medium]
kind = homogeneous

[trace]
r0 = 0,0,0
p0 = 1,0,0
t_max = 10
hbar_scal = 0.5
)";
    try {
        parse_config(text, Command::trace);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("hbar_scal") != std::string::npos);
        CHECK(what.find("hbar_scale") != std::string::npos);
    }
}

TEST_CASE("noise resolution floor dt <= T/1000") {
    const std::string text = R"(
[noise]
theta0 = 1.0471975511965976
T = 100
D = 1e-4
dt = 0.2
n = 100
)";
    try {
        parse_config(text, Command::noise_ensemble);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("resolution floor") != std::string::npos);
    }

    const std::string ok = R"(
[noise]
theta0 = 1.0471975511965976
T = 100
D = 1e-4
dt = 0.1
n = 100
)";
    CHECK_NOTHROW(parse_config(ok, Command::noise_ensemble));
}

TEST_CASE("effective config round-trips") {
    const char* configs[] = {kMinimalTrace, R"(
seed = 77
[noise]
theta0 = 0.7853981633974483
T = 40
D = 2e-4
dt = 0.04
n = 5000
estimator = exact
emit_raw = true
)"};
    const Command commands[] = {Command::trace, Command::noise_ensemble};
    for (int i = 0; i < 2; ++i) {
        const RunConfig first = parse_config(configs[i], commands[i]);
        const std::string rendered = render_effective_config(first);
        const RunConfig second = parse_config(rendered, commands[i]);
        CHECK(render_effective_config(second) == rendered);
    }
}

TEST_CASE("structural errors carry line diagnostics") {
    CHECK_THROWS_AS(parse_config("[medium\nkind = homogeneous", Command::trace), ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nkind homogeneous", Command::trace), ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nkind = homogeneous\nkind = homogeneous",
                                 Command::trace),
                    ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nkind =", Command::trace), ParseError);
}

TEST_CASE("sections are restricted per command") {
    CHECK_THROWS_AS(parse_config("[noise]\ntheta0 = 1\nT = 10\nD = 1e-4\ndt = 0.01\nn = 10",
                                 Command::trace),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(kMinimalTrace, Command::loop_phase), ValidationError);
    CHECK_NOTHROW(parse_config("", Command::validate));
    CHECK_THROWS_AS(parse_config("[path]\nkind = circle\ntheta = 1", Command::validate),
                    ValidationError);
}

TEST_CASE("medium keys are kind-specific") {
    const std::string text = R"(
[medium]
kind = gaussian_lens
a = 0.1
kappa = 0.5

[trace]
r0 = 0,0,0
p0 = 1,0,0
t_max = 1
)";
    try {
        parse_config(text, Command::trace);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("kappa") != std::string::npos);
    }
}

TEST_CASE("value constraints") {
    CHECK_THROWS_AS(parse_config(R"(
[path]
kind = circle
theta = 0
)",
                                 Command::loop_phase),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"(
[path]
kind = circle
theta = 1
sigma = 2
)",
                                 Command::loop_phase),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"(
[medium]
kind = homogeneous
[trace]
r0 = 0,0,0
p0 = 0,0,0
t_max = 1
)",
                                 Command::trace),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"(
[medium]
kind = homogeneous
[trace]
r0 = 0,0
p0 = 1,0,0
t_max = 1
)",
                                 Command::trace),
                    ValidationError);
}
