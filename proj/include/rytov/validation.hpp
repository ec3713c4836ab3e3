#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rytov {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double runtime_s = 0.0;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 12345;
    int threads = 0;
    std::filesystem::path out_dir;  // empty: keep artifacts in memory only
    bool determinism_check = true;  // re-runs the suite to compare artifact bytes
};

struct ValidationReport {
    std::vector<CriterionResult> criteria;
    bool all_passed = false;
};

/// Runs the full acceptance suite. Every criterion evaluates at its pinned
/// tolerance; artifacts (pure computation outputs, no timestamps) land under
/// out_dir/artifacts. The determinism criterion repeats the computation with
/// the same seed and compares artifact bytes.
ValidationReport run_acceptance_criteria(const ValidationOptions& options);

/// One line per criterion: PASS/FAIL, id, name, runtime, detail.
void write_validation_report(std::ostream& os, const ValidationReport& report);

}  // namespace rytov
