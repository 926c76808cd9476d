#pragma once

#include <cstdint>
#include <filesystem>
#include <map>

#include "ballistic/config.hpp"

namespace ballistic {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code contract: 0 = all hard assertions passed, 1 = assertion failure,
// 2 = config error, 3 = numerical abort (norm drift).
enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitConfig = 2, kExitNumerical = 3 };

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path out_dir;
    std::vector<std::string> failures;           // machine-readable failure list (also in manifest)
    std::map<std::string, std::uint64_t> checksums; // file -> fnv1a64
    // Key scalars for sweep aggregation.
    double slope_r1 = std::numeric_limits<double>::quiet_NaN();
    double ratio_min = std::numeric_limits<double>::quiet_NaN();
    double ratio_max = std::numeric_limits<double>::quiet_NaN();
    double min_rayleigh = std::numeric_limits<double>::quiet_NaN();
    double compact_norm = std::numeric_limits<double>::quiet_NaN();
};

/// Executes the declared pipeline: realize potential -> propagate/record ->
/// analyze -> spectral experiments if requested. Writes series CSVs, report
/// JSONs and the run manifest into out_dir.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SweepRow {
    double value = 0;
    int exit_code = 0;
    std::string status;
    RunResult result;
};

/// Runs the config across an axis grid (axis in {alpha, lambda, theta, L, r}),
/// one fully independent run per point, workers in a thread pool. Per-point
/// failures are recorded in-row; the sweep continues. Writes sweep.csv.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                std::span<const double> values, int workers,
                                const std::filesystem::path& out_dir);

/// Applies one axis value to a config copy; throws ConfigError for an
/// incompatible axis/family combination.
ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis, double value);

} // namespace ballistic
