#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ballistic/potentials.hpp"

namespace ballistic {

/// Config parse/validation failure; carries the config line and field so the
/// CLI can print a diagnostic and exit 2.
struct ConfigError : std::runtime_error {
    ConfigError(std::string msg, int line_ = 0, std::string field_ = {})
        : std::runtime_error(std::move(msg)), line(line_), field(std::move(field_)) {}
    int line;
    std::string field;
};

struct InitialDelta {
    std::vector<int> site;
};
struct InitialGaussian {
    std::vector<int> center;
    double width = 1;
    std::vector<double> momentum; // empty = no plane-wave factor
};
struct InitialFile {
    std::string path;
};
using InitialSpec = std::variant<InitialDelta, InitialGaussian, InitialFile>;

struct SampleGridConfig {
    enum class Kind { Linear, Log, List } kind = Kind::Log;
    double t_lo = 1;
    double t_hi = -1; // -1 = auto: resolved to the light-cone horizon
    int count = 48;
    std::vector<double> values; // List kind
};

struct FitConfig {
    double t_lo = 10;
    double t_hi = -1; // -1 = auto: 0.8 * horizon
    double slope_tol = 0.05;
};

struct PropagatorConfig {
    double tau = -1; // -1 = auto: half_width * tau = 20
    double tolerance = 1e-14;
    double safety = 0.9;
};

struct SpectralBlockConfig {
    bool enabled = false;
    double theta = 1.0;
    double e0 = 0.0;
    std::vector<double> deltas = {1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
    double ipr_threshold = -1; // -1 = auto: 10 / total_sites
    double boundary_threshold = 0.05;
    std::int64_t dense_cap = 4096;
    bool dump_eigs = false;
    std::optional<std::pair<double, double>> cross_i;
    std::optional<std::pair<double, double>> cross_j;
};

/// Optional hard expectations encoded in the config; violations exit 1.
struct ExpectConfig {
    std::optional<double> slope_r;
    std::optional<double> slope_min;
    std::optional<double> slope_max;
    std::optional<double> ball_sup_min;
    std::optional<int> ball_sup_radius;
    std::optional<double> ratio_band_max;
};

struct ExperimentConfig {
    int dimension = 1;
    int radius = 64;
    PotentialSpec potential = ZeroPotential{};
    bool potential_seed_explicit = false; // anderson seed given in [potential]
    InitialSpec initial = InitialDelta{{0}};
    std::vector<double> orders = {1.0, 2.0};
    std::vector<int> ball_radii = {25};
    SampleGridConfig samples;
    FitConfig fit;
    PropagatorConfig propagator;
    SpectralBlockConfig spectral;
    ExpectConfig expect;
    std::uint64_t seed = 1;
    std::string out = "out";
    bool dump_potential = false;

    /// Canonical flat-text serialization (fixed key order, shortest
    /// round-trip floats). parse(serialize(c)) == c.
    std::string serialize() const;
    /// FNV-1a hash of the canonical serialization, as 16 hex digits.
    std::string hash() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Auto fields resolved against the geometry/initial state; populated by
/// validate_and_resolve.
struct ResolvedRun {
    ExperimentConfig config;
    double horizon = 0;
    int initial_support = 0;
    double tau = 0;
    double fit_lo = 0, fit_hi = 0;
    std::vector<double> sample_times;
    double ipr_threshold = 0;
};

/// Validates the config (throws ConfigError) and resolves every `auto`:
/// the horizon rule must be satisfiable, spectral experiments must respect
/// the dense cap, tolerances must lie in (0,1).
ResolvedRun validate_and_resolve(const ExperimentConfig& cfg);

/// Initial state construction shared by the runner and validation.
LatticeState build_initial_state(const ExperimentConfig& cfg, GeometryPtr geometry);

} // namespace ballistic
