#include "rytov/raytrace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rytov/errors.hpp"

namespace rytov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAxisGuardRel = 1e-12;

using State6 = std::array<double, 6>;  // (r, p)

State6 pack(const Vec3& r, const Vec3& p) { return {r.x, r.y, r.z, p.x, p.y, p.z}; }
Vec3 position(const State6& y) { return {y[0], y[1], y[2]}; }
Vec3 momentum(const State6& y) { return {y[3], y[4], y[5]}; }

// Dormand-Prince 5(4) tableau, FSAL.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

RayDerivative ray_rhs(const PhononState& state, const MediumModel& medium, double hbar_scale) {
    const double p_norm = state.p.norm();
    if (!(p_norm > 0.0)) throw ZeroMomentumError("ray equations undefined at zero momentum");
    const SpeedSample cs = speed_and_gradient(medium, state.r);

    RayDerivative d;
    d.dp = cs.gradient * (-p_norm);
    d.dr = state.p * (cs.c / p_norm);
    if (hbar_scale != 0.0) {
        d.dr += cross(state.p, d.dp) * (state.sigma * hbar_scale / (p_norm * p_norm * p_norm));
    }
    return d;
}

PhaseAccumulator::PhaseAccumulator(int sigma, double hbar_scale, const Vec3& p0)
    : sigma_(sigma), hbar_(hbar_scale), p_prev_(p0) {
    if (sigma != 1 && sigma != -1)
        throw DomainError("helicity must be +1 or -1, got " + std::to_string(sigma));
    if (!(p0.norm() > 0.0)) throw ZeroMomentumError("accumulator needs nonzero momentum");
    const double rho = std::hypot(p0.x, p0.y);
    phi_valid_ = rho > kAxisGuardRel * p0.norm();
    phi_prev_ = phi_valid_ ? std::atan2(p0.y, p0.x) : 0.0;
}

void PhaseAccumulator::step(const Vec3& p_next) {
    const double n_prev = p_prev_.norm();
    const double n_next = p_next.norm();
    if (!(n_next > 0.0)) throw ZeroMomentumError("momentum vanished during accumulation");

    // Rytov angle: trapezoid in cos(theta) against the unwrapped azimuth.
    const double rho = std::hypot(p_next.x, p_next.y);
    double dphi = 0.0;
    if (rho > kAxisGuardRel * n_next) {
        const double phi = std::atan2(p_next.y, p_next.x);
        if (phi_valid_) dphi = std::remainder(phi - phi_prev_, kTwoPi);
        phi_prev_ = phi;
        phi_valid_ = true;
    }
    const double cos_prev = p_prev_.z / n_prev;
    const double cos_next = p_next.z / n_next;
    gamma_ += sigma_ * 0.5 * (cos_prev + cos_next) * dphi;
    phi_unwrapped_ += dphi;

    // Hall displacement: midpoint momentum against the exact step increment.
    if (hbar_ != 0.0) {
        const Vec3 p_mid = (p_prev_ + p_next) * 0.5;
        const double mid_norm = p_mid.norm();
        if (mid_norm > 0.0) {
            const Vec3 dhall =
                cross(p_mid, p_next - p_prev_) * (sigma_ * hbar_ / (mid_norm * mid_norm * mid_norm));
            hall_ += dhall;
            const double dnorm = dhall.norm();
            if (dnorm > 0.0) {
                const double axial = std::abs(dot(dhall, p_mid)) / (dnorm * mid_norm);
                max_axial_ratio_ = std::max(max_axial_ratio_, axial);
            }
        }
    }
    p_prev_ = p_next;
}

void PhaseAccumulator::accumulate(std::span<const Vec3> momenta) {
    for (const Vec3& p : momenta) step(p);
}

double Trajectory::max_h_drift() const {
    if (samples.empty()) return 0.0;
    const double h0 = samples.front().h_value;
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, std::abs(s.h_value - h0));
    return worst / std::abs(h0);
}

MomentumPath Trajectory::extract_momentum_path(bool closed, double closure_tol) const {
    std::vector<PathSample> ps;
    ps.reserve(samples.size());
    for (const auto& s : samples) ps.push_back({s.t, s.state.p});
    return MomentumPath(std::move(ps), closed, closure_tol);
}

Trajectory integrate(const PhononState& state0, const MediumModel& medium,
                     const TraceConfig& config) {
    if (!(config.t_max > 0.0)) throw ValidationError("t_max must be positive");
    if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0))
        throw ValidationError("integrator tolerances must be positive");
    if (!(config.hbar_scale >= 0.0)) throw ValidationError("hbar_scale must be non-negative");
    if (config.output_stride < 1) throw ValidationError("output_stride must be >= 1");
    if (!(state0.p.norm() > 0.0)) throw ZeroMomentumError("initial momentum must be nonzero");
    if (config.bbox && !config.bbox->contains(state0.r))
        throw ValidationError("initial position lies outside the bounding box");

    const double p0_norm = state0.p.norm();
    const double hmax = config.max_step > 0.0 ? config.max_step : config.t_max;

    auto rhs = [&](const State6& y) -> State6 {
        PhononState s{position(y), momentum(y), state0.sigma, 0.0, {}};
        const RayDerivative d = ray_rhs(s, medium, config.hbar_scale);
        return pack(d.dr, d.dp);
    };

    Trajectory traj;
    State6 y = pack(state0.r, state0.p);
    double t = 0.0;
    PhaseAccumulator acc(state0.sigma, config.hbar_scale, state0.p);

    double gamma = state0.gamma_acc;
    Vec3 hall = state0.hall_acc;

    auto record = [&](double time, const State6& yy) {
        PhononState s{position(yy), momentum(yy), state0.sigma, gamma + acc.gamma(),
                      hall + acc.hall()};
        const double h_val = transverse_speed(medium, s.r) * s.p.norm();
        traj.samples.push_back({time, s, h_val});
    };
    record(0.0, y);

    State6 k1 = rhs(y);
    const auto scaled_norm = [&](const State6& err, const State6& ya, const State6& yb) {
        double sum = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double sc =
                config.abs_tol + config.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double q = err[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / 6.0);
    };

    // initial step from the local derivative scale
    double h;
    {
        double ynorm = 0.0, fnorm = 0.0;
        for (int i = 0; i < 6; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        h = fnorm > 0.0 ? 0.01 * (1.0 + ynorm) / fnorm : config.t_max / 100.0;
        h = std::min({h, hmax, config.t_max});
    }

    double next_grid = config.output_grid_dt > 0.0 ? config.output_grid_dt : 0.0;
    std::size_t steps_since_record = 0;
    const double t_end = config.t_max;

    // PI step control (Hairer's stabilized controller for the 5(4) pair)
    constexpr double kBeta = 0.08;
    constexpr double kExpo = 0.2 - 0.75 * kBeta;
    double err_old = 1e-4;

    while (t < t_end) {
        h = std::min(h, hmax);
        if (config.output_grid_dt > 0.0 && next_grid > t && next_grid < t + h) h = next_grid - t;
        if (t + h > t_end) h = t_end - t;
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw StepSizeUnderflowError("step size underflow at t = " + std::to_string(t));

        const State6 k2v = [&] {
            State6 yy;
            for (int i = 0; i < 6; ++i) yy[i] = y[i] + h * a21 * k1[i];
            return rhs(yy);
        }();
        const State6 k3v = [&] {
            State6 yy;
            for (int i = 0; i < 6; ++i) yy[i] = y[i] + h * (a31 * k1[i] + a32 * k2v[i]);
            return rhs(yy);
        }();
        const State6 k4v = [&] {
            State6 yy;
            for (int i = 0; i < 6; ++i)
                yy[i] = y[i] + h * (a41 * k1[i] + a42 * k2v[i] + a43 * k3v[i]);
            return rhs(yy);
        }();
        const State6 k5v = [&] {
            State6 yy;
            for (int i = 0; i < 6; ++i)
                yy[i] = y[i] + h * (a51 * k1[i] + a52 * k2v[i] + a53 * k3v[i] + a54 * k4v[i]);
            return rhs(yy);
        }();
        const State6 k6v = [&] {
            State6 yy;
            for (int i = 0; i < 6; ++i)
                yy[i] = y[i] + h * (a61 * k1[i] + a62 * k2v[i] + a63 * k3v[i] + a64 * k4v[i] +
                                    a65 * k5v[i]);
            return rhs(yy);
        }();

        State6 y_new;
        for (int i = 0; i < 6; ++i)
            y_new[i] =
                y[i] + h * (b1 * k1[i] + b3 * k3v[i] + b4 * k4v[i] + b5 * k5v[i] + b6 * k6v[i]);
        const State6 k7v = rhs(y_new);

        State6 err;
        for (int i = 0; i < 6; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3v[i] + e4 * k4v[i] + e5 * k5v[i] + e6 * k6v[i] +
                          e7 * k7v[i]);
        const double err_norm = scaled_norm(err, y, y_new);

        if (!std::isfinite(err_norm)) {
            traj.n_rejected += 1;
            h *= 0.2;
            continue;
        }

        if (err_norm <= 1.0) {
            y = y_new;
            t += h;
            k1 = k7v;  // FSAL
            traj.n_accepted += 1;
            {
                double e_abs = 0.0;
                for (int i = 0; i < 6; ++i) e_abs += err[i] * err[i];
                traj.error_estimate += std::sqrt(e_abs);
            }

            const Vec3 p_now = momentum(y);
            const Vec3 r_now = position(y);
            if (p_now.norm() < 1e-12 * p0_norm) {
                record(t, y);
                traj.terminated = TraceStatus::zero_momentum;
                traj.max_hall_axial_ratio = acc.max_axial_ratio();
                return traj;
            }
            acc.step(p_now);

            const bool at_end = t >= t_end * (1.0 - 1e-15);
            bool on_grid = false;
            if (config.output_grid_dt > 0.0 && t >= next_grid * (1.0 - 1e-15)) {
                on_grid = true;
                next_grid += config.output_grid_dt;
            }
            steps_since_record += 1;

            if (config.bbox && !config.bbox->contains(r_now)) {
                record(t, y);
                traj.terminated = TraceStatus::domain_exit;
                traj.max_hall_axial_ratio = acc.max_axial_ratio();
                return traj;
            }

            const bool want_record = config.output_grid_dt > 0.0
                                         ? on_grid
                                         : steps_since_record >= static_cast<std::size_t>(
                                                                     config.output_stride);
            if (want_record || at_end) {
                record(t, y);
                steps_since_record = 0;
            }
            if (at_end) break;

            const double factor =
                err_norm > 0.0
                    ? 0.9 * std::pow(err_norm, -kExpo) * std::pow(err_old, kBeta)
                    : 5.0;
            err_old = std::max(err_norm, 1e-4);
            h *= std::clamp(factor, 0.2, 5.0);
        } else {
            traj.n_rejected += 1;
            h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 1.0);
        }
    }

    traj.terminated = TraceStatus::completed;
    traj.max_hall_axial_ratio = acc.max_axial_ratio();
    return traj;
}

Vec3 hall_shift(const Trajectory& traj) {
    if (traj.samples.empty()) throw ValidationError("hall_shift on an empty trajectory");
    return traj.final_sample().state.hall_acc;
}

SplittingResult helicity_splitting(const Scenario& scenario, const TraceConfig& config) {
    TraceConfig shared = config;
    if (shared.output_grid_dt <= 0.0) shared.output_grid_dt = config.t_max / 200.0;

    PhononState plus{scenario.r0, scenario.p0, +1, 0.0, {}};
    PhononState minus{scenario.r0, scenario.p0, -1, 0.0, {}};

    SplittingResult result;
    result.plus = integrate(plus, scenario.medium, shared);
    result.minus = integrate(minus, scenario.medium, shared);

    const std::size_t n = std::min(result.plus.samples.size(), result.minus.samples.size());
    result.separation.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = result.plus.samples[i];
        const auto& b = result.minus.samples[i];
        result.separation.emplace_back(a.t, (a.state.r - b.state.r).norm());
    }
    return result;
}

}  // namespace rytov
