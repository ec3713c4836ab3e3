#include "rytov/validation.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "rytov/berry.hpp"
#include "rytov/errors.hpp"
#include "rytov/io.hpp"
#include "rytov/medium.hpp"
#include "rytov/noise.hpp"
#include "rytov/raytrace.hpp"
#include "rytov/stats.hpp"

namespace rytov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using ArtifactMap = std::map<std::string, std::string>;

struct CritContext {
    std::uint64_t seed;
    int threads;
    ArtifactMap* artifacts;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ tag); }

double wrap_diff(double a, double b) { return std::remainder(a - b, kTwoPi); }

/// 4th-order central difference of one component of the connection.
double partial_connection(const Vec3& p, int wrt_axis, int component, double h) {
    const auto eval = [&](double offset) {
        Vec3 q = p;
        (wrt_axis == 0 ? q.x : wrt_axis == 1 ? q.y : q.z) += offset;
        const Vec3 a = connection(q);
        return component == 0 ? a.x : component == 1 ? a.y : a.z;
    };
    return (eval(-2 * h) - 8.0 * eval(-h) + 8.0 * eval(h) - eval(2 * h)) / (12.0 * h);
}

Vec3 fd_curl_connection(const Vec3& p, double h) {
    return {partial_connection(p, 1, 2, h) - partial_connection(p, 2, 1, h),
            partial_connection(p, 2, 0, h) - partial_connection(p, 0, 2, h),
            partial_connection(p, 0, 1, h) - partial_connection(p, 1, 0, h)};
}

struct DuctHelix {
    double omega;
    double sin_theta;
    double cos_theta;
    Vec3 r0;
    Vec3 p0;
};

/// Closed-form spiral of the axial duct c = c0 (1 + kappa^2 rho^2 / 2):
/// a ray launched tangentially at radius R circulates with angular rate
/// omega = c0 kappa sqrt(1 + kappa^2 R^2 / 2) while its momentum direction
/// traces a cone of half-angle asin(kappa R / sqrt(1 + kappa^2 R^2 / 2)).
DuctHelix duct_helix(double c0, double kappa, double radius, double p_mag) {
    DuctHelix h;
    const double root = std::sqrt(1.0 + 0.5 * kappa * kappa * radius * radius);
    h.omega = c0 * kappa * root;
    h.sin_theta = kappa * radius / root;
    h.cos_theta = std::sqrt(1.0 - h.sin_theta * h.sin_theta);
    h.r0 = {radius, 0.0, 0.0};
    h.p0 = Vec3{0.0, h.sin_theta, h.cos_theta} * p_mag;
    return h;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

CriterionResult finish(int id, const std::string& name, const Timer& timer, bool passed,
                       double runtime_limit, const std::string& detail) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.runtime_s = timer.seconds();
    r.passed = passed && (runtime_limit <= 0.0 || r.runtime_s < runtime_limit);
    r.detail = detail;
    if (passed && runtime_limit > 0.0 && r.runtime_s >= runtime_limit)
        r.detail += " [runtime limit " + std::to_string(runtime_limit) + " s exceeded]";
    return r;
}

// ---------------------------------------------------------------------------
// 1. Rytov law on analytic constant-zenith loops: all three estimators.
// ---------------------------------------------------------------------------
CriterionResult crit_rytov_circles(const CritContext& ctx) {
    Timer timer;
    const int n_samples = 20000;
    const double thetas[] = {kPi / 6, kPi / 4, kPi / 3, kPi / 2};

    std::ostringstream art;
    art << "theta,expected,gamma_line,gamma_solid,gamma_transport\n";
    double worst = 0.0;
    double worst_pair = 0.0;
    bool ok = true;
    for (double theta : thetas) {
        const MomentumPath path = MomentumPath::circle(theta, 1.0, n_samples);
        const double expected = kTwoPi * std::cos(theta);

        const PhaseResult li = rytov_line_integral(path, +1);
        const PhaseResult sa = rytov_solid_angle(path, +1);
        const Vec3 u0 = path.samples().front().p.normalized();
        const Vec3 e0 = cross(Vec3{0, 0, 1}, u0).normalized();
        const double pt = transport_polarization(path, e0);

        const double err_li = std::abs(li.gamma - expected);
        const double err_sa = std::abs(sa.gamma - expected);
        const double err_pt = std::abs(wrap_diff(pt, expected));
        const double pair_li_sa = std::abs(wrap_diff(li.gamma, sa.gamma));
        const double pair_li_pt = std::abs(wrap_diff(li.gamma, pt));
        const double pair_sa_pt = std::abs(wrap_diff(sa.gamma, pt));

        worst = std::max({worst, err_li, err_sa, err_pt});
        worst_pair = std::max({worst_pair, pair_li_sa, pair_li_pt, pair_sa_pt});
        ok = ok && err_li < 1e-6 && err_sa < 1e-6 && err_pt < 1e-6 && pair_li_sa < 1e-6 &&
             pair_li_pt < 1e-6 && pair_sa_pt < 1e-6 && li.winding == 1 && sa.winding == 1;

        art << format_g17(theta) << ',' << format_g17(expected) << ',' << format_g17(li.gamma)
            << ',' << format_g17(sa.gamma) << ',' << format_g17(pt) << '\n';
    }
    (*ctx.artifacts)["crit01_rytov_circles.csv"] = art.str();
    std::ostringstream detail;
    detail << "max |gamma - 2 pi cos theta| = " << worst << ", max pairwise (mod 2 pi) = "
           << worst_pair << " (tol 1e-6)";
    return finish(1, "rytov-law-analytic-loops", timer, ok, 1.0, detail.str());
}

// ---------------------------------------------------------------------------
// 2. Monopole structure: finite-difference curl and sphere flux.
// ---------------------------------------------------------------------------
CriterionResult crit_monopole(const CritContext& ctx) {
    Timer timer;
    std::mt19937_64 rng(sub_seed(ctx.seed, 2));
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    double worst_curl = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double mag = 0.5 + 1.5 * u01(rng);
        const double z = -0.95 + 1.9 * u01(rng);
        const double phi = kTwoPi * u01(rng);
        const double s = std::sqrt(1.0 - z * z);
        const Vec3 p = Vec3{s * std::cos(phi), s * std::sin(phi), z} * mag;

        const double axis_dist = std::hypot(p.x, p.y);
        const Vec3 numeric = fd_curl_connection(p, 0.01 * axis_dist);
        const Vec3 expected = curvature(p, +1);  // -p / |p|^3
        worst_curl = std::max(worst_curl, (numeric - expected).norm() / expected.norm());
    }

    double worst_flux = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double radius = 0.3 + 2.7 * u01(rng);
        const int sigma = (i % 2 == 0) ? +1 : -1;
        const double flux = monopole_flux(sigma, radius);
        worst_flux = std::max(worst_flux, std::abs(flux - (-4.0 * kPi * sigma)) / (4.0 * kPi));
    }

    const bool ok = worst_curl < 1e-5 && worst_flux < 1e-6;
    std::ostringstream art;
    art << "max_curl_rel_error," << format_g17(worst_curl) << "\n";
    art << "max_flux_rel_error," << format_g17(worst_flux) << "\n";
    (*ctx.artifacts)["crit02_monopole.csv"] = art.str();
    std::ostringstream detail;
    detail << "curl rel err " << worst_curl << " (tol 1e-5), flux rel err " << worst_flux
           << " (tol 1e-6)";
    return finish(2, "monopole-structure", timer, ok, 5.0, detail.str());
}

// ---------------------------------------------------------------------------
// 3. Hall displacement over one momentum-cone revolution.
// ---------------------------------------------------------------------------
CriterionResult crit_hall(const CritContext& ctx) {
    Timer timer;
    struct Case {
        double theta, p_mag, hbar;
        int sigma;
    };
    const Case cases[] = {{kPi / 3, 1.0, 1.0, +1},
                          {kPi / 2, 1.0, 1.0, +1},
                          {1.0, 2.0, 1.0, -1},
                          {kPi / 4, 0.5, 0.25, +1}};
    const int n = 50000;

    std::ostringstream art;
    art << "theta,p_mag,sigma,hbar,hall_z,expected_z,rel_error,max_axial_ratio\n";
    bool ok = true;
    double worst = 0.0, worst_axial = 0.0;
    for (const Case& c : cases) {
        std::vector<Vec3> momenta;
        momenta.reserve(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double phi = kTwoPi * i / n;
            momenta.push_back(Vec3{std::sin(c.theta) * std::cos(phi),
                                   std::sin(c.theta) * std::sin(phi), std::cos(c.theta)} *
                              c.p_mag);
        }
        PhaseAccumulator acc(c.sigma, c.hbar, momenta.front());
        acc.accumulate(std::span<const Vec3>(momenta).subspan(1));

        const Vec3 expected{0.0, 0.0,
                            kTwoPi * c.sigma * c.hbar * std::sin(c.theta) * std::sin(c.theta) /
                                c.p_mag};
        const double rel = (acc.hall() - expected).norm() / expected.norm();
        worst = std::max(worst, rel);
        worst_axial = std::max(worst_axial, acc.max_axial_ratio());
        ok = ok && rel < 1e-6 && acc.max_axial_ratio() < 1e-10;
        art << format_g17(c.theta) << ',' << format_g17(c.p_mag) << ',' << c.sigma << ','
            << format_g17(c.hbar) << ',' << format_g17(acc.hall().z) << ','
            << format_g17(expected.z) << ',' << format_g17(rel) << ','
            << format_g17(acc.max_axial_ratio()) << '\n';
    }
    (*ctx.artifacts)["crit03_hall.csv"] = art.str();
    std::ostringstream detail;
    detail << "hall rel err " << worst << " (tol 1e-6), axial ratio " << worst_axial
           << " (tol 1e-10)";
    return finish(3, "hall-displacement", timer, ok, 1.0, detail.str());
}

// ---------------------------------------------------------------------------
// 4. Classical limit and linear-in-hbar helicity splitting in the lens.
// ---------------------------------------------------------------------------
CriterionResult crit_classical_limit(const CritContext& ctx) {
    Timer timer;
    Scenario scenario{MediumModel::gaussian_lens(0.1, 1.0), {-6.0, 0.8, 0.0}, {1.0, 0.0, 0.0}};
    TraceConfig config;
    config.t_max = 12.0;
    config.rel_tol = 1e-10;
    config.abs_tol = 1e-13;
    config.output_grid_dt = 0.06;

    config.hbar_scale = 0.0;
    const SplittingResult classical = helicity_splitting(scenario, config);
    double max_sep = 0.0, max_r = 1.0;
    for (const auto& [t, sep] : classical.separation) {
        (void)t;
        max_sep = std::max(max_sep, sep);
    }
    for (const auto& s : classical.plus.samples) max_r = std::max(max_r, s.state.r.norm());
    const double coincide_tol = 10.0 * config.rel_tol * max_r;
    const bool coincide_ok = max_sep <= coincide_tol;

    const double hbars[] = {1e-3, 2e-3, 4e-3};
    std::vector<double> log_h, log_sep;
    std::ostringstream art;
    art << "hbar,separation\n";
    for (double hbar : hbars) {
        config.hbar_scale = hbar;
        const SplittingResult split = helicity_splitting(scenario, config);
        const double sep = split.separation.back().second;
        log_h.push_back(std::log(hbar));
        log_sep.push_back(std::log(sep));
        art << format_g17(hbar) << ',' << format_g17(sep) << '\n';
    }
    const LinearFit fit = linear_fit(log_h, log_sep);
    const bool slope_ok = std::abs(fit.slope - 1.0) < 0.01;
    art << "classical_max_separation," << format_g17(max_sep) << '\n';
    art << "loglog_slope," << format_g17(fit.slope) << '\n';
    (*ctx.artifacts)["crit04_splitting.csv"] = art.str();

    std::ostringstream detail;
    detail << "classical max separation " << max_sep << " (tol " << coincide_tol
           << "), splitting slope " << fit.slope << " (target 1 +- 0.01)";
    return finish(4, "classical-limit-splitting", timer, coincide_ok && slope_ok, 10.0,
                  detail.str());
}

// ---------------------------------------------------------------------------
// 5. End-to-end Rytov angle along the duct spiral, five revolutions.
// ---------------------------------------------------------------------------
CriterionResult crit_duct(const CritContext& ctx) {
    Timer timer;
    const double kappa = 0.5, radius = 1.0;
    const DuctHelix helix = duct_helix(1.0, kappa, radius, 1.0);
    const MediumModel duct = MediumModel::axial_duct(kappa);

    TraceConfig config;
    config.hbar_scale = 0.0;
    // trace a quarter turn beyond five revolutions so the fifth azimuth
    // crossing lies strictly inside the sampled range
    config.t_max = 5.25 * kTwoPi / helix.omega;
    config.rel_tol = 1e-11;
    config.abs_tol = 1e-13;
    config.output_stride = 1;

    PhononState state0{helix.r0, helix.p0, +1, 0.0, {}};
    const Trajectory traj = integrate(state0, duct, config);

    // unwrap the momentum azimuth over the recorded samples
    const auto& samples = traj.samples;
    std::vector<double> phi(samples.size()), gamma(samples.size());
    double phi_acc = std::atan2(samples[0].state.p.y, samples[0].state.p.x);
    double prev_raw = phi_acc;
    double cos_sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec3& p = samples[i].state.p;
        const double raw = std::atan2(p.y, p.x);
        if (i > 0) phi_acc += std::remainder(raw - prev_raw, kTwoPi);
        prev_raw = raw;
        phi[i] = phi_acc;
        gamma[i] = samples[i].state.gamma_acc;
        cos_sum += p.z / p.norm();
    }
    const double cos_cone = cos_sum / static_cast<double>(samples.size());
    const double expected_rev = kTwoPi * cos_cone;

    std::ostringstream art;
    art << "revolution,gamma_increment,expected,error\n";
    bool ok = traj.terminated == TraceStatus::completed;
    double worst = 0.0;
    double gamma_prev = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const double target = phi[0] + kTwoPi * k;
        std::size_t i = 1;
        while (i < samples.size() && phi[i] < target) ++i;
        if (i >= samples.size()) {
            ok = false;
            break;
        }
        const double w = (target - phi[i - 1]) / (phi[i] - phi[i - 1]);
        const double gamma_k = gamma[i - 1] + w * (gamma[i] - gamma[i - 1]);
        const double inc = gamma_k - gamma_prev;
        gamma_prev = gamma_k;
        const double err = std::abs(inc - expected_rev);
        worst = std::max(worst, err);
        ok = ok && err < 1e-5;
        art << k << ',' << format_g17(inc) << ',' << format_g17(expected_rev) << ','
            << format_g17(err) << '\n';
    }
    const double drift = traj.max_h_drift();
    ok = ok && drift < 1e-8;
    art << "h_drift," << format_g17(drift) << ",,\n";
    art << "cos_theta_cone," << format_g17(cos_cone) << ',' << format_g17(helix.cos_theta)
        << ",\n";
    (*ctx.artifacts)["crit05_duct.csv"] = art.str();

    std::ostringstream detail;
    detail << "per-revolution gamma error " << worst << " (tol 1e-5), H drift " << drift
           << " (tol 1e-8)";
    return finish(5, "duct-rytov-end-to-end", timer, ok, 10.0, detail.str());
}

// ---------------------------------------------------------------------------
// 6 + 7. Noise ensemble: zero mean and the closed-form variance law.
// ---------------------------------------------------------------------------
std::pair<CriterionResult, CriterionResult> crit_noise_mean_variance(const CritContext& ctx) {
    Timer timer;
    PrescribedPath path{1.0, kPi / 3, 100.0, {}};
    NoiseModel model{1e-4, sub_seed(ctx.seed, 6), 0.01};
    EnsembleOptions options{ctx.threads, 61};
    const EnsembleSummary s = run_ensemble(path, model, 10000, DeltaGammaEstimator::linearized,
                                           options);

    std::ostringstream art;
    write_ensemble_summary(art, s);
    (*ctx.artifacts)["crit06_07_ensemble.txt"] = art.str();

    const bool mean_ok = std::abs(s.mean) < 3.0 * s.std_error_mean;
    std::ostringstream d6;
    d6 << "|mean| = " << std::abs(s.mean) << " vs 3 SE = " << 3.0 * s.std_error_mean;
    CriterionResult r6 = finish(6, "noise-mean", timer, mean_ok, 60.0, d6.str());

    const double rel = std::abs(s.variance - s.predicted_variance) / s.predicted_variance;
    const bool var_ok = rel < 0.05;
    std::ostringstream d7;
    d7 << "variance " << s.variance << " vs predicted " << s.predicted_variance << ", rel dev "
       << rel << " (tol 0.05)";
    CriterionResult r7 = finish(7, "variance-law", timer, var_ok, 60.0, d7.str());
    r7.runtime_s = r6.runtime_s;  // shared ensemble
    return {r6, r7};
}

// ---------------------------------------------------------------------------
// 8. 1/T scaling of the variance plus linearity in D.
// ---------------------------------------------------------------------------
CriterionResult crit_one_over_T(const CritContext& ctx) {
    Timer timer;
    const double periods[] = {10.0, 20.0, 40.0, 80.0};
    EnsembleOptions options{ctx.threads, 61};

    std::vector<double> log_T, log_var;
    std::ostringstream art;
    art << "T,variance,predicted\n";
    for (double period : periods) {
        PrescribedPath path{1.0, kPi / 3, period, {}};
        NoiseModel model{1e-4, sub_seed(ctx.seed, 800 + static_cast<std::uint64_t>(period)),
                         period / 1000.0};
        const EnsembleSummary s =
            run_ensemble(path, model, 10000, DeltaGammaEstimator::linearized, options);
        log_T.push_back(std::log(period));
        log_var.push_back(std::log(s.variance));
        art << format_g17(period) << ',' << format_g17(s.variance) << ','
            << format_g17(s.predicted_variance) << '\n';
    }
    const LinearFit fit = linear_fit(log_T, log_var);
    const bool slope_ok = std::abs(fit.slope + 1.0) < 0.05;

    // doubling D doubles the variance (independent draws, 3-sigma band)
    PrescribedPath path{1.0, kPi / 3, 10.0, {}};
    NoiseModel model_d{1e-4, sub_seed(ctx.seed, 881), 0.01};
    NoiseModel model_2d{2e-4, sub_seed(ctx.seed, 882), 0.01};
    const EnsembleSummary s_d =
        run_ensemble(path, model_d, 10000, DeltaGammaEstimator::linearized, options);
    const EnsembleSummary s_2d =
        run_ensemble(path, model_2d, 10000, DeltaGammaEstimator::linearized, options);
    const double ratio = s_2d.variance / (2.0 * s_d.variance);
    const bool ratio_ok = std::abs(ratio - 1.0) < 0.06;

    art << "loglog_slope," << format_g17(fit.slope) << ",\n";
    art << "doubling_ratio," << format_g17(ratio) << ",\n";
    (*ctx.artifacts)["crit08_scaling.csv"] = art.str();

    std::ostringstream detail;
    detail << "slope " << fit.slope << " (target -1 +- 0.05), var(2D)/(2 var(D)) = " << ratio
           << " (tol 0.06)";
    return finish(8, "one-over-T-robustness", timer, slope_ok && ratio_ok, 300.0, detail.str());
}

// ---------------------------------------------------------------------------
// 9. Gaussianity of the linearized deviation.
// ---------------------------------------------------------------------------
CriterionResult crit_gaussianity(const CritContext& ctx) {
    Timer timer;
    PrescribedPath path{1.0, kPi / 3, 100.0, {}};
    NoiseModel model{1e-4, sub_seed(ctx.seed, 9), 0.1};
    EnsembleOptions options{ctx.threads, 61};
    const EnsembleSummary s =
        run_ensemble(path, model, 100000, DeltaGammaEstimator::linearized, options);

    const bool ok = std::abs(s.skewness) < 0.08 && std::abs(s.excess_kurtosis) < 0.05;
    std::ostringstream art;
    art << "skewness," << format_g17(s.skewness) << '\n';
    art << "excess_kurtosis," << format_g17(s.excess_kurtosis) << '\n';
    (*ctx.artifacts)["crit09_gaussianity.csv"] = art.str();

    std::ostringstream detail;
    detail << "skewness " << s.skewness << " (tol 0.08), excess kurtosis " << s.excess_kurtosis
           << " (tol 0.05)";
    return finish(9, "gaussianity", timer, ok, 300.0, detail.str());
}

// ---------------------------------------------------------------------------
// 10. Exact vs linearized estimator: relative mean-square difference ~ D.
// ---------------------------------------------------------------------------
CriterionResult crit_estimator_consistency(const CritContext& ctx) {
    Timer timer;
    PrescribedPath path{1.0, kPi / 2, 100.0, {}};
    EnsembleOptions options{ctx.threads, 61};
    const double intensities[] = {1e-5, 1e-4, 1e-3};

    std::vector<double> log_D, log_ratio;
    std::ostringstream art;
    art << "D,ms_difference,ms_linearized,ratio\n";
    for (double intensity : intensities) {
        NoiseModel model{intensity, sub_seed(ctx.seed, 1000), 0.1};
        const PairedDeltas pairs = paired_deltas(path, model, 1000, options);
        double ms_diff = 0.0, ms_lin = 0.0;
        for (std::size_t i = 0; i < pairs.exact.size(); ++i) {
            const double d = pairs.exact[i] - pairs.linearized[i];
            ms_diff += d * d;
            ms_lin += pairs.linearized[i] * pairs.linearized[i];
        }
        ms_diff /= static_cast<double>(pairs.exact.size());
        ms_lin /= static_cast<double>(pairs.exact.size());
        const double ratio = ms_diff / ms_lin;
        log_D.push_back(std::log(intensity));
        log_ratio.push_back(std::log(ratio));
        art << format_g17(intensity) << ',' << format_g17(ms_diff) << ',' << format_g17(ms_lin)
            << ',' << format_g17(ratio) << '\n';
    }
    const LinearFit fit = linear_fit(log_D, log_ratio);
    const bool ok = std::abs(fit.slope - 1.0) < 0.1;
    art << "loglog_slope," << format_g17(fit.slope) << ",,\n";
    (*ctx.artifacts)["crit10_consistency.csv"] = art.str();

    std::ostringstream detail;
    detail << "log-log slope of relative MS difference vs D = " << fit.slope
           << " (target 1 +- 0.1)";
    return finish(10, "estimator-consistency", timer, ok, 60.0, detail.str());
}

std::vector<CriterionResult> run_criteria_once(std::uint64_t seed, int threads,
                                               ArtifactMap& artifacts) {
    CritContext ctx{seed, threads, &artifacts};
    std::vector<CriterionResult> results;
    results.push_back(crit_rytov_circles(ctx));
    results.push_back(crit_monopole(ctx));
    results.push_back(crit_hall(ctx));
    results.push_back(crit_classical_limit(ctx));
    results.push_back(crit_duct(ctx));
    auto [r6, r7] = crit_noise_mean_variance(ctx);
    results.push_back(std::move(r6));
    results.push_back(std::move(r7));
    results.push_back(crit_one_over_T(ctx));
    results.push_back(crit_gaussianity(ctx));
    results.push_back(crit_estimator_consistency(ctx));
    return results;
}

}  // namespace

ValidationReport run_acceptance_criteria(const ValidationOptions& options) {
    ValidationReport report;
    ArtifactMap artifacts;
    report.criteria = run_criteria_once(options.seed, options.threads, artifacts);

    if (!options.out_dir.empty()) {
        const std::filesystem::path dir = options.out_dir / "artifacts";
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : artifacts) {
            std::ofstream os(dir / name, std::ios::binary);
            os << content;
        }
    }

    if (options.determinism_check) {
        Timer timer;
        ArtifactMap rerun;
        run_criteria_once(options.seed, options.threads, rerun);
        bool identical = artifacts.size() == rerun.size();
        std::string mismatch;
        if (identical) {
            for (const auto& [name, content] : artifacts) {
                const auto it = rerun.find(name);
                if (it == rerun.end() || it->second != content) {
                    identical = false;
                    mismatch = name;
                    break;
                }
            }
        }
        CriterionResult r;
        r.id = 11;
        r.name = "determinism";
        r.passed = identical;
        r.runtime_s = timer.seconds();
        r.detail = identical ? "repeated run produced byte-identical artifacts ("
                                   + std::to_string(artifacts.size()) + " files)"
                             : "artifact mismatch: " + mismatch;
        report.criteria.push_back(std::move(r));
    }

    report.all_passed = true;
    for (const auto& c : report.criteria) report.all_passed = report.all_passed && c.passed;
    return report;
}

void write_validation_report(std::ostream& os, const ValidationReport& report) {
    for (const auto& c : report.criteria) {
        os << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << " [" << c.name << "] ("
           << c.runtime_s << " s): " << c.detail << '\n';
    }
    os << (report.all_passed ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << '\n';
}

}  // namespace rytov
