#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rytov/config.hpp"
#include "rytov/errors.hpp"
#include "rytov/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw rytov::ValidationError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int dispatch(rytov::Command command, const std::string& config_file, const rytov::RunOptions& options) {
    try {
        const std::string text = config_file.empty() ? "" : read_file(config_file);
        rytov::RunConfig config = rytov::parse_config(text, command);
        return rytov::run(std::move(config), options);
    } catch (const rytov::Error& e) {
        std::cerr << "ERROR " << e.code() << ": " << e.what() << std::endl;
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transverse-phonon polarization transport toolkit: geometric-phase "
                 "estimators, helicity-dependent ray tracing and noise ensembles"};
    app.require_subcommand(1);

    std::string config_file;
    std::string out_dir = "out";
    bool quiet = false;
    std::optional<std::uint64_t> seed_override;

    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* copt = sub->add_option("--config", config_file, "run configuration file");
        if (config_required) copt->required();
        sub->add_option("--out", out_dir, "output directory (default: out)");
        sub->add_flag("--quiet", quiet, "suppress stdout logging");
        sub->add_option("--seed", seed_override, "override the configured seed");
    };

    CLI::App* trace = app.add_subcommand("trace", "integrate one ray and emit its trajectory");
    add_common(trace, true);
    CLI::App* loop = app.add_subcommand("loop-phase",
                                        "evaluate all phase estimators on a momentum loop");
    add_common(loop, true);
    CLI::App* noise = app.add_subcommand("noise-ensemble",
                                         "Monte Carlo ensemble of noisy rotation angles");
    add_common(noise, true);
    CLI::App* validate = app.add_subcommand("validate", "run the built-in validation suite");
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);

    rytov::RunOptions options;
    options.out_dir = out_dir;
    options.quiet = quiet;
    options.seed_override = seed_override;

    if (trace->parsed()) return dispatch(rytov::Command::trace, config_file, options);
    if (loop->parsed()) return dispatch(rytov::Command::loop_phase, config_file, options);
    if (noise->parsed()) return dispatch(rytov::Command::noise_ensemble, config_file, options);
    return dispatch(rytov::Command::validate, config_file, options);
}
