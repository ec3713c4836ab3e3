#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rytov/medium.hpp"
#include "rytov/noise.hpp"
#include "rytov/raytrace.hpp"

namespace rytov {

enum class Command { trace, loop_phase, noise_ensemble, validate };

struct TraceSettings {
    Vec3 r0;
    Vec3 p0;
    int sigma = 1;
    TraceConfig integ;
    double adiabaticity_threshold = 1e-2;
};

struct PathSettings {
    enum class Source { circle, csv };
    enum class ClosedMode { automatic, closed, open };

    Source source = Source::circle;
    double theta = 0.0;
    double p_mag = 1.0;
    int samples = 20000;
    int windings = 1;
    std::string file;
    ClosedMode closed = ClosedMode::automatic;
    double closure_tol = 1e-9;
    double max_angular_step = 0.1;
    int sigma = 1;
};

struct NoiseSettings {
    double theta0 = 0.0;
    double p0_mag = 1.0;
    double period = 0.0;
    double intensity = 0.0;
    double dt = 0.0;
    std::uint64_t n = 0;
    DeltaGammaEstimator estimator = DeltaGammaEstimator::linearized;
    bool emit_raw = false;
    int histogram_bins = 61;
    int threads = 0;
};

/// Fully validated run description. Sections are present exactly when the
/// command uses them; every default that was applied during parsing is
/// recorded for the run log.
struct RunConfig {
    Command command = Command::validate;
    std::uint64_t seed = 1;
    std::optional<MediumModel> medium;
    std::optional<TraceSettings> trace;
    std::optional<PathSettings> path;
    std::optional<NoiseSettings> noise;
    std::vector<std::string> applied_defaults;
};

/// Parses the structured-text configuration for the given command. Unknown
/// keys and sections are hard errors with line diagnostics and a
/// nearest-valid-key suggestion; all value constraints are enforced here.
RunConfig parse_config(const std::string& text, Command command);

/// Effective configuration (defaults applied) as parseable text; feeding it
/// back through parse_config yields an equivalent RunConfig.
std::string render_effective_config(const RunConfig& config);

const char* command_name(Command command);

}  // namespace rytov
