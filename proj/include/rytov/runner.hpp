#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "rytov/config.hpp"

namespace rytov {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    bool quiet = false;
    std::optional<std::uint64_t> seed_override;
};

/// Executes one fully validated run configuration: writes the effective
/// config, the run log (the only timestamped artifact) and the
/// command-specific outputs into out_dir. Returns the process exit status;
/// failures print one machine-parseable `ERROR <code>: ...` line on stderr.
int run(RunConfig config, const RunOptions& options);

}  // namespace rytov
