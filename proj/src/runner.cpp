#include "rytov/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "rytov/berry.hpp"
#include "rytov/errors.hpp"
#include "rytov/io.hpp"
#include "rytov/validation.hpp"

namespace rytov {

namespace {

/// Run log sink: timestamps live here and only here, so every other artifact
/// stays byte-reproducible.
class RunLog {
public:
    RunLog(const std::filesystem::path& path, bool quiet)
        : os_(path, std::ios::binary), quiet_(quiet) {}

    void line(const std::string& message) {
        os_ << '[' << timestamp() << "] " << message << '\n';
        if (!quiet_) std::cout << message << '\n';
    }

    void quiet_line(const std::string& message) { os_ << '[' << timestamp() << "] " << message << '\n'; }

private:
    static std::string timestamp() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm_utc{};
        gmtime_r(&tt, &tm_utc);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        return buf;
    }

    std::ofstream os_;
    bool quiet_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + path.string());
    os << content;
}

const char* phase_method_name(PhaseMethod m) {
    switch (m) {
        case PhaseMethod::line_integral: return "line_integral";
        case PhaseMethod::solid_angle: return "solid_angle";
        case PhaseMethod::polarization_transport: return "polarization_transport";
    }
    return "?";
}

int run_trace(const RunConfig& config, const RunOptions& options, RunLog& log) {
    const TraceSettings& settings = *config.trace;
    const MediumModel& medium = *config.medium;

    if (settings.integ.hbar_scale > 0.0) {
        const double eps = adiabaticity(medium, settings.r0, settings.p0.norm(),
                                        settings.integ.hbar_scale);
        log.line("adiabaticity at launch: " + format_g17(eps));
        if (eps > settings.adiabaticity_threshold)
            log.line("warning: adiabaticity " + format_g17(eps) + " exceeds threshold " +
                     format_g17(settings.adiabaticity_threshold) +
                     "; polarization transport is strained here");
    } else {
        log.quiet_line("classical limit (hbar_scale = 0): adiabaticity check skipped");
    }

    PhononState state0{settings.r0, settings.p0, settings.sigma, 0.0, {}};
    const Trajectory traj = integrate(state0, medium, settings.integ);

    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(options.out_dir / "trajectory.csv", csv.str());

    const TrajectorySample& last = traj.final_sample();
    std::ostringstream summary;
    summary << "status: "
            << (traj.terminated == TraceStatus::completed
                    ? "completed"
                    : traj.terminated == TraceStatus::domain_exit ? "domain_exit"
                                                                  : "zero_momentum")
            << '\n';
    summary << "t_final: " << format_g17(last.t) << '\n';
    summary << "r_final: " << format_g17(last.state.r.x) << ',' << format_g17(last.state.r.y)
            << ',' << format_g17(last.state.r.z) << '\n';
    summary << "p_final: " << format_g17(last.state.p.x) << ',' << format_g17(last.state.p.y)
            << ',' << format_g17(last.state.p.z) << '\n';
    summary << "gamma: " << format_g17(last.state.gamma_acc) << '\n';
    summary << "hall: " << format_g17(last.state.hall_acc.x) << ','
            << format_g17(last.state.hall_acc.y) << ',' << format_g17(last.state.hall_acc.z)
            << '\n';
    summary << "h_drift: " << format_g17(traj.max_h_drift()) << '\n';
    summary << "hall_axial_ratio: " << format_g17(traj.max_hall_axial_ratio) << '\n';
    summary << "steps_accepted: " << traj.n_accepted << '\n';
    summary << "steps_rejected: " << traj.n_rejected << '\n';
    write_file(options.out_dir / "summary.txt", summary.str());

    log.line("trace finished: " + std::to_string(traj.n_accepted) + " steps, gamma = " +
             format_g17(last.state.gamma_acc));
    return 0;
}

int run_loop_phase(const RunConfig& config, const RunOptions& options, RunLog& log) {
    const PathSettings& settings = *config.path;
    EstimatorOptions opts;
    opts.max_angular_step = settings.max_angular_step;

    std::optional<MomentumPath> path;
    if (settings.source == PathSettings::Source::circle) {
        path = MomentumPath::circle(settings.theta, settings.p_mag, settings.samples,
                                    settings.windings);
    } else {
        std::ifstream is(settings.file);
        if (!is) throw ValidationError("cannot open path file " + settings.file);
        // closed mode 'auto' probes the endpoint gap after loading
        MomentumPath probe = read_path_csv(is, /*closed=*/false, settings.closure_tol);
        bool closed = settings.closed == PathSettings::ClosedMode::closed;
        if (settings.closed == PathSettings::ClosedMode::automatic)
            closed = probe.endpoint_gap() <= settings.closure_tol;
        path = MomentumPath(probe.samples(), closed, settings.closure_tol);
    }

    std::ostringstream table;
    table << "method,gamma,winding,closure_correction,closure_arc_length,note\n";

    const auto emit = [&](PhaseMethod method, const char* note, const PhaseResult& r) {
        table << phase_method_name(method) << ',' << format_g17(r.gamma) << ',' << r.winding
              << ',' << format_g17(r.closure_correction) << ','
              << format_g17(r.closure_arc_length) << ',' << note << '\n';
    };

    try {
        const PhaseResult li = rytov_line_integral(*path, settings.sigma, opts);
        emit(PhaseMethod::line_integral, "", li);
    } catch (const AxisSingularityError&) {
        // gauge fallback: rotate the loop's area normal onto the pole
        Vec3 normal{};
        const auto& s = path->samples();
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            normal += cross(s[i].p.normalized(), s[i + 1].p.normalized());
        if (normal.norm() > 1e-12) {
            const MomentumPath rotated = rotate_gauge(*path, normal.normalized(), opts);
            const PhaseResult li = rytov_line_integral(rotated, settings.sigma, opts);
            emit(PhaseMethod::line_integral, "gauge_rotated", li);
            log.line("line integral used the rotated-gauge fallback");
        } else {
            table << "line_integral,,,,,error=E_AXIS_SINGULARITY\n";
            log.line("line integral unavailable: path on the gauge string");
        }
    } catch (const Error& e) {
        table << "line_integral,,,,,error=" << e.code() << '\n';
        log.line(std::string("line integral unavailable: ") + e.what());
    }

    const PhaseResult sa = rytov_solid_angle(*path, settings.sigma, opts);
    emit(PhaseMethod::solid_angle, "", sa);

    try {
        const Vec3 u0 = path->samples().front().p.normalized();
        Vec3 e0 = cross(Vec3{0, 0, 1}, u0);
        if (e0.norm() < 1e-8) e0 = cross(Vec3{1, 0, 0}, u0);
        const double pt = transport_polarization(*path, e0.normalized(), opts);
        PhaseResult r;
        r.gamma = pt;
        r.method = PhaseMethod::polarization_transport;
        emit(PhaseMethod::polarization_transport, "sigma_plus_convention", r);
    } catch (const Error& e) {
        table << "polarization_transport,,,,,error=" << e.code() << '\n';
        log.line(std::string("polarization transport unavailable: ") + e.what());
    }

    write_file(options.out_dir / "phases.csv", table.str());
    log.line("loop-phase finished; solid-angle gamma = " + format_g17(sa.gamma));
    return 0;
}

int run_noise_ensemble(const RunConfig& config, const RunOptions& options, RunLog& log) {
    const NoiseSettings& settings = *config.noise;
    PrescribedPath path{settings.p0_mag, settings.theta0, settings.period, {}};
    NoiseModel model{settings.intensity, config.seed, settings.dt};
    EnsembleOptions ens_opts{settings.threads, settings.histogram_bins};

    std::vector<double> deltas;
    const EnsembleSummary summary =
        run_ensemble(path, model, settings.n, settings.estimator, ens_opts,
                     settings.emit_raw ? &deltas : nullptr);

    std::ostringstream text;
    write_ensemble_summary(text, summary);
    write_file(options.out_dir / "ensemble.txt", text.str());
    if (settings.emit_raw) {
        std::ostringstream raw;
        write_deltas_csv(raw, deltas);
        write_file(options.out_dir / "delta_gamma.csv", raw.str());
    }
    if (summary.amplitude_excursions > 0)
        log.line("warning: " + std::to_string(summary.amplitude_excursions) +
                 " realizations exceeded 0.3 p0 noise amplitude");

    log.line("ensemble finished: variance = " + format_g17(summary.variance) +
             ", predicted = " + format_g17(summary.predicted_variance));
    return 0;
}

int run_validate(const RunConfig& config, const RunOptions& options, RunLog& log) {
    ValidationOptions vopts;
    vopts.seed = config.seed;
    vopts.out_dir = options.out_dir;
    const ValidationReport report = run_acceptance_criteria(vopts);

    std::ostringstream text;
    write_validation_report(text, report);
    write_file(options.out_dir / "validate_report.txt", text.str());
    if (!options.quiet) std::cout << text.str();
    log.quiet_line(report.all_passed ? "validation passed" : "validation FAILED");
    return report.all_passed ? 0 : 1;
}

}  // namespace

int run(RunConfig config, const RunOptions& options) {
    try {
        if (options.seed_override) config.seed = *options.seed_override;
        std::filesystem::create_directories(options.out_dir);

        RunLog log(options.out_dir / "run.log", options.quiet);
        log.quiet_line(std::string("command: ") + command_name(config.command));
        log.quiet_line("seed: " + std::to_string(config.seed));
        for (const auto& d : config.applied_defaults) log.quiet_line("default applied: " + d);

        write_file(options.out_dir / "effective_config.cfg", render_effective_config(config));

        switch (config.command) {
            case Command::trace: return run_trace(config, options, log);
            case Command::loop_phase: return run_loop_phase(config, options, log);
            case Command::noise_ensemble: return run_noise_ensemble(config, options, log);
            case Command::validate: return run_validate(config, options, log);
        }
        return 1;
    } catch (const Error& e) {
        std::cerr << "ERROR " << e.code() << ": " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR E_INTERNAL: " << e.what() << std::endl;
        return 1;
    }
}

}  // namespace rytov
