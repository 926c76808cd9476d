#include "ballistic/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "ballistic/io.hpp"
#include "ballistic/propagation.hpp"
#include "ballistic/transport.hpp"
#include "ballistic/util.hpp"

namespace ballistic {

namespace {

using nlohmann::json;

json fit_to_json(const ExponentFit& f) {
    return json{{"r", f.r},
                {"t_lo", f.t_lo},
                {"t_hi", f.t_hi},
                {"n_samples", f.n_samples},
                {"slope", f.slope},
                {"intercept", f.intercept},
                {"residual_rms", f.residual_rms},
                {"slope_spread", f.slope_spread},
                {"ratio_min", f.ratio_min},
                {"ratio_max", f.ratio_max}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

struct OutputWriter {
    std::filesystem::path dir;
    std::map<std::string, std::uint64_t>& checksums;

    void emit(const std::string& name, const std::string& contents) {
        write_text_file(dir / name, contents);
        checksums[name] = fnv1a64(contents);
    }
};

std::string environment_fingerprint() {
    std::ostringstream os;
    os << "cxx=" <<
#if defined(__clang__)
        "clang-" << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
        "gcc-" << __GNUC__ << "." << __GNUC_MINOR__;
#else
        "unknown";
#endif
    os << ";eigen=" << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
    os << ";sizeof_long=" << sizeof(long);
    return os.str();
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResult result;
    result.out_dir = out_dir;
    ResolvedRun run = validate_and_resolve(cfg); // throws ConfigError -> exit 2 at the CLI
    const std::string hash = cfg.hash();

    std::filesystem::create_directories(out_dir);
    OutputWriter out{out_dir, result.checksums};

    GeometryPtr g = make_geometry(cfg.dimension, cfg.radius);
    PotentialField field = realize(cfg.potential, g);
    const auto profile = decay_profile(field);
    Hamiltonian h(field);
    LatticeState initial = build_initial_state(cfg, g);

    if (cfg.dump_potential) {
        std::ostringstream os;
        write_potential_csv(os, h.potential(), hash);
        out.emit("potential.csv", os.str());
    }

    ChebyshevPropagator propagator(h, run.tau, cfg.propagator.tolerance);
    MomentSeries series;
    try {
        series = record_moments(h, propagator, initial, cfg.orders, run.sample_times, cfg.ball_radii, run.horizon,
                                hash);
    } catch (const NormDriftError& e) {
        result.exit_code = kExitNumerical;
        result.failures.push_back(std::string("numerical abort: ") + e.what());
        json manifest{{"config_hash", hash}, {"version", kVersion}, {"failures", result.failures}};
        out.emit("manifest.json", dump_json(manifest));
        return result;
    }
    {
        std::ostringstream os;
        write_series_csv(os, series);
        out.emit("series.csv", os.str());
    }

    // Fits per order (r > 0 only), plus the hard bound checks.
    json fits = json::array();
    for (double r : cfg.orders) {
        if (!(r > 0)) continue;
        ExponentFit f = fit_transport_exponent(series, r, run.fit_lo, run.fit_hi);
        fits.push_back(fit_to_json(f));
        if (r == 1.0) {
            result.slope_r1 = f.slope;
            result.ratio_min = f.ratio_min;
            result.ratio_max = f.ratio_max;
        }
    }

    const bool have_order1 = std::find(cfg.orders.begin(), cfg.orders.end(), 1.0) != cfg.orders.end();
    const bool have_order2 = std::find(cfg.orders.begin(), cfg.orders.end(), 2.0) != cfg.orders.end();
    json bounds;
    if (have_order1 && have_order2) {
        UpperBoundReport rep = check_upper_bounds(series, h, initial);
        bounds = json{{"c1_hat", rep.c1_hat},
                      {"u_norm0", rep.u_norm0},
                      {"u_norm1", rep.u_norm1},
                      {"u_norm2", rep.u_norm2},
                      {"order1_violation", rep.order1_violation},
                      {"order1_worst_margin", rep.order1_worst_margin},
                      {"c2_min", rep.c2_min},
                      {"c2_reference", rep.c2_reference}};
        if (rep.order1_violation)
            result.failures.push_back("order-1 envelope violated: margin " +
                                      format_double(rep.order1_worst_margin));
    }

    // Per-sample moment inequalities are always-on hard assertions.
    MomentInequalityReport ineq = check_moment_inequalities(series);
    if (ineq.jensen_violations > 0)
        result.failures.push_back("jensen inequality violated on " + std::to_string(ineq.jensen_violations) +
                                  " samples (worst slack " + format_double(ineq.jensen_worst_slack) + ")");
    if (ineq.interp_violations > 0)
        result.failures.push_back("interpolation inequality violated on " + std::to_string(ineq.interp_violations) +
                                  " samples (worst slack " + format_double(ineq.interp_worst_slack) + ")");

    json rage = json::array();
    if (series.ball_radii.size() >= 2) {
        for (const auto& rep : rage_diagnostics(series))
            rage.push_back(json{{"radius", rep.radius},
                                {"sup_ball", rep.sup_ball},
                                {"time_avg_final", rep.time_avg_final},
                                {"time_avg_half", rep.time_avg_half},
                                {"tail_pointwise", rep.tail_pointwise},
                                {"label", rep.label}});
    }

    // Config-encoded expectations.
    if (cfg.expect.slope_r) {
        ExponentFit f = fit_transport_exponent(series, *cfg.expect.slope_r, run.fit_lo, run.fit_hi);
        if (cfg.expect.slope_min && f.slope < *cfg.expect.slope_min)
            result.failures.push_back("slope " + format_double(f.slope) + " below expected minimum " +
                                      format_double(*cfg.expect.slope_min));
        if (cfg.expect.slope_max && f.slope > *cfg.expect.slope_max)
            result.failures.push_back("slope " + format_double(f.slope) + " above expected maximum " +
                                      format_double(*cfg.expect.slope_max));
        if (cfg.expect.ratio_band_max && f.ratio_min > 0 &&
            f.ratio_max / f.ratio_min > *cfg.expect.ratio_band_max)
            result.failures.push_back("ratio band " + format_double(f.ratio_max / f.ratio_min) +
                                      " exceeds expected maximum " + format_double(*cfg.expect.ratio_band_max));
    }
    if (cfg.expect.ball_sup_min) {
        const int radius = cfg.expect.ball_sup_radius.value_or(series.ball_radii.front());
        const std::size_t col = series.radius_index(radius);
        double sup = 0;
        for (const auto& row : series.ball) sup = std::max(sup, row[col]);
        if (sup < *cfg.expect.ball_sup_min)
            result.failures.push_back("sup in-ball probability " + format_double(sup) + " below expected " +
                                      format_double(*cfg.expect.ball_sup_min));
    }

    // Spectral experiments on dense-capped boxes.
    json spectral_report;
    if (cfg.spectral.enabled) {
        SpectralDecomposition dec = dense_eigendecomposition(h, cfg.spectral.dense_cap);
        const EnergyInterval window = EnergyInterval::j_theta(cfg.spectral.theta, cfg.dimension);
        MourreFormResult mourre = mourre_form_min(dec, h, window);
        result.min_rayleigh = mourre.min_rayleigh;
        spectral_report["mourre"] = json{{"interval", {window.lo, window.hi}},
                                         {"theta", cfg.spectral.theta},
                                         {"min_rayleigh", mourre.min_rayleigh},
                                         {"window_rank", mourre.window_rank}};
        const bool is_free = std::holds_alternative<ZeroPotential>(cfg.potential);
        SpectralDecomposition free_dec =
            is_free ? dec : dense_eigendecomposition(free_hamiltonian(g), cfg.spectral.dense_cap);
        CompactSplitReport split = mourre_compact_split(free_dec, dec, h, window);
        result.compact_norm = split.compact_norm;
        spectral_report["compact_split"] = json{{"min_rayleigh_free", split.min_rayleigh_free},
                                                {"compact_norm", split.compact_norm},
                                                {"certified_bound", split.certified_bound},
                                                {"rank_full", split.rank_full},
                                                {"rank_free", split.rank_free}};
        json scan = json::array();
        for (const auto& row :
             shrink_interval_scan(free_dec, dec, h, window, cfg.spectral.e0, cfg.spectral.deltas, cfg.spectral.theta))
            scan.push_back(json{{"delta", row.delta},
                                {"lo", row.lo},
                                {"hi", row.hi},
                                {"rank", row.rank},
                                {"compact_norm", row.compact_norm},
                                {"min_rayleigh_free", row.min_rayleigh_free},
                                {"certified_bound", row.certified_bound},
                                {"below_half_theta", row.below_half_theta}});
        spectral_report["shrink_scan"] = scan;

        auto shared_dec = std::make_shared<const SpectralDecomposition>(std::move(dec));
        AcSurrogateProjector proj =
            ac_surrogate_projection(shared_dec, window, run.ipr_threshold, cfg.spectral.boundary_threshold);
        auto [first, last] = mode_range(*shared_dec, window);
        spectral_report["ac_surrogate"] = json{{"selected_modes", proj.modes.size()},
                                               {"window_modes", last - first},
                                               {"ipr_threshold", run.ipr_threshold},
                                               {"boundary_threshold", cfg.spectral.boundary_threshold}};
        if (cfg.spectral.dump_eigs) {
            std::ostringstream os;
            write_eigs_csv(os, *shared_dec, mode_delocalization(*shared_dec), hash);
            out.emit("eigs.csv", os.str());
        }
        if (cfg.spectral.cross_i) {
            EnergyInterval wi(cfg.spectral.cross_i->first, cfg.spectral.cross_i->second);
            EnergyInterval wj(cfg.spectral.cross_j->first, cfg.spectral.cross_j->second);
            CrossTermSeries cross = cross_term_series(*shared_dec, wi, wj, initial, run.sample_times);
            spectral_report["cross_terms"] = json{{"almost_orthog_fraction", cross.almost_orthog_fraction},
                                                  {"max_c_abs", cross.max_c_abs},
                                                  {"norm1_bound", cross.norm1_bound},
                                                  {"c0_consistency", cross.c0_consistency}};
        }
    }

    json decay = json::array();
    for (const auto& p : profile) decay.push_back(json{{"radius", p.radius}, {"value", p.value}});

    json report{{"config_hash", hash},
                {"potential_family", family_name(cfg.potential)},
                {"satisfies_decay_hypothesis", satisfies_decay_hypothesis(profile)},
                {"decay_profile", decay},
                {"horizon", run.horizon},
                {"initial_support", run.initial_support},
                {"tau", run.tau},
                {"chebyshev_order", propagator.base_order()},
                {"fits", fits},
                {"moment_inequalities",
                 json{{"jensen_checks", ineq.jensen_checks},
                      {"jensen_violations", ineq.jensen_violations},
                      {"jensen_worst_slack", ineq.jensen_worst_slack},
                      {"interp_checks", ineq.interp_checks},
                      {"interp_violations", ineq.interp_violations},
                      {"interp_worst_slack", ineq.interp_worst_slack}}}};
    if (!bounds.is_null()) report["bounds"] = bounds;
    if (!rage.empty()) report["rage"] = rage;
    if (!spectral_report.is_null()) report["spectral"] = spectral_report;
    out.emit("report.json", dump_json(report));

    if (!result.failures.empty()) result.exit_code = kExitAssertion;

    const auto wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t_start).count();
    json outputs = json::array();
    for (const auto& [name, sum] : result.checksums) outputs.push_back(json{{"file", name}, {"fnv1a64", hex64(sum)}});
    json manifest{{"config_hash", hash},
                  {"version", kVersion},
                  {"wall_ms", wall_ms},
                  {"environment", environment_fingerprint()},
                  {"outputs", outputs},
                  {"failures", result.failures},
                  {"exit_code", result.exit_code}};
    write_text_file(out_dir / "manifest.json", dump_json(manifest));
    return result;
}

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis, double value) {
    ExperimentConfig cfg = base;
    if (axis == "alpha") {
        auto* p = std::get_if<PowerLawPotential>(&cfg.potential);
        if (!p) throw ConfigError("axis alpha requires a power_law potential", 0, "potential.family");
        p->alpha = value;
    } else if (axis == "lambda") {
        auto* p = std::get_if<AndersonPotential>(&cfg.potential);
        if (!p) throw ConfigError("axis lambda requires an anderson potential", 0, "potential.family");
        p->lambda = value;
    } else if (axis == "theta") {
        cfg.spectral.theta = value;
        cfg.spectral.enabled = true;
    } else if (axis == "L") {
        const int L = static_cast<int>(std::llround(value));
        if (static_cast<double>(L) != value || L < 2) throw ConfigError("axis L requires integer radius >= 2", 0, "geometry.radius");
        cfg.radius = L;
    } else if (axis == "r") {
        if (std::find(cfg.orders.begin(), cfg.orders.end(), value) == cfg.orders.end()) cfg.orders.push_back(value);
        cfg.expect.slope_r = value;
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "' (use alpha|lambda|theta|L|r)", 0, "axis");
    }
    return cfg;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                std::span<const double> values, int workers,
                                const std::filesystem::path& out_dir) {
    if (values.empty()) throw ConfigError("empty sweep axis grid", 0, "axis");
    std::filesystem::create_directories(out_dir);
    std::vector<SweepRow> rows(values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            SweepRow& row = rows[i];
            row.value = values[i];
            const std::filesystem::path point_dir = out_dir / (axis + "=" + format_double(values[i]));
            try {
                ExperimentConfig cfg = apply_axis(base, axis, values[i]);
                row.result = run_experiment(cfg, point_dir);
                row.exit_code = row.result.exit_code;
                row.status = row.exit_code == 0 ? "ok" : "assertion_failure";
                if (row.exit_code == kExitNumerical) row.status = "numerical_abort";
            } catch (const ConfigError& e) {
                row.exit_code = kExitConfig;
                row.status = std::string("config_error: ") + e.what();
            } catch (const std::exception& e) {
                row.exit_code = kExitAssertion;
                row.status = std::string("error: ") + e.what();
            }
        }
    };
    const int n_workers = std::max(1, workers);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Single-threaded aggregation in axis order keeps the CSV deterministic.
    std::ostringstream os;
    os << "# config_hash=" << base.hash() << "\n";
    os << axis << ",exit_code,status,slope_r1,ratio_min,ratio_max,min_rayleigh,compact_norm\n";
    for (const auto& row : rows) {
        os << format_double(row.value) << ',' << row.exit_code << ',' << row.status << ','
           << format_double(row.result.slope_r1) << ',' << format_double(row.result.ratio_min) << ','
           << format_double(row.result.ratio_max) << ',' << format_double(row.result.min_rayleigh) << ','
           << format_double(row.result.compact_norm) << '\n';
    }
    write_text_file(out_dir / "sweep.csv", os.str());
    return rows;
}

} // namespace ballistic
