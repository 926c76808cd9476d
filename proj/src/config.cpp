#include "ballistic/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ballistic/io.hpp"
#include "ballistic/propagation.hpp"
#include "ballistic/util.hpp"

namespace ballistic {

namespace {

struct RawEntry {
    std::string value;
    int line;
    bool used = false;
};

using RawConfig = std::map<std::string, RawEntry>; // "section.key" -> entry

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string s = line;
        if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = s.find_last_not_of(" \t\r");
        s = s.substr(b, e - b + 1);
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header", lineno, s);
            section = s.substr(1, s.size() - 2);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", lineno, s);
        auto trim = [](std::string t) {
            auto bb = t.find_first_not_of(" \t");
            auto ee = t.find_last_not_of(" \t");
            return bb == std::string::npos ? std::string{} : t.substr(bb, ee - bb + 1);
        };
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno, s);
        if (section.empty()) throw ConfigError("key outside any [section]", lineno, key);
        const std::string full = section + "." + key;
        if (raw.count(full)) throw ConfigError("duplicate key " + full, lineno, full);
        raw[full] = RawEntry{value, lineno};
    }
    return raw;
}

class Reader {
public:
    explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

    bool has(const std::string& key) { return raw_.count(key) > 0; }

    std::optional<std::string> get(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) throw ConfigError("missing required key " + key, 0, key);
        return *v;
    }

    double number(const std::string& key, double fallback) {
        auto v = get(key);
        if (!v) return fallback;
        return parse_number(key, *v);
    }

    double parse_number(const std::string& key, const std::string& v) {
        try {
            return parse_double(v);
        } catch (const std::exception&) {
            throw ConfigError("bad number for " + key + ": '" + v + "'", line_of(key), key);
        }
    }

    double number_or_auto(const std::string& key, double fallback) {
        auto v = get(key);
        if (!v || *v == "auto") return fallback;
        return parse_number(key, *v);
    }

    long integer(const std::string& key, long fallback) {
        const double d = number(key, static_cast<double>(fallback));
        const long r = static_cast<long>(std::llround(d));
        if (static_cast<double>(r) != d) throw ConfigError("expected integer for " + key, line_of(key), key);
        return r;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError("expected boolean for " + key + ": '" + *v + "'", line_of(key), key);
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        auto v = get(key);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(parse_number(key, cell));
        if (out.empty()) throw ConfigError("empty list for " + key, line_of(key), key);
        return out;
    }

    std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
        auto v = get(key);
        if (!v) return fallback;
        std::vector<int> out;
        for (double d : numbers(key, {})) {
            const int r = static_cast<int>(std::llround(d));
            if (static_cast<double>(r) != d) throw ConfigError("expected integer list for " + key, line_of(key), key);
            out.push_back(r);
        }
        return out;
    }

    int line_of(const std::string& key) const {
        auto it = raw_.find(key);
        return it == raw_.end() ? 0 : it->second.line;
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : raw_)
            if (!entry.used) throw ConfigError("unknown key " + key, entry.line, key);
    }

private:
    RawConfig raw_;
};

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    Reader r(tokenize(text));
    ExperimentConfig cfg;

    cfg.dimension = static_cast<int>(r.integer("geometry.dimension", 1));
    cfg.radius = static_cast<int>(r.integer("geometry.radius", 64));

    cfg.seed = static_cast<std::uint64_t>(r.integer("run.seed", 1));
    cfg.out = r.get("run.out").value_or("out");
    cfg.dump_potential = r.boolean("run.dump_potential", false);

    const std::string family = r.get("potential.family").value_or("zero");
    if (family == "zero") {
        cfg.potential = ZeroPotential{};
    } else if (family == "power_law") {
        cfg.potential = PowerLawPotential{r.number("potential.c", 1.0), r.number("potential.alpha", 2.0)};
    } else if (family == "wigner_von_neumann") {
        cfg.potential = WignerVonNeumannPotential{r.number("potential.c", 1.0), r.number("potential.k", 1.0)};
    } else if (family == "anderson") {
        cfg.potential_seed_explicit = r.has("potential.seed");
        cfg.potential = AndersonPotential{r.number("potential.lambda", 1.0),
                                          static_cast<std::uint64_t>(r.integer("potential.seed",
                                                                               static_cast<long>(cfg.seed)))};
    } else if (family == "periodic") {
        cfg.potential = PeriodicPotential{r.numbers("potential.pattern", {0.0})};
    } else {
        throw ConfigError("unknown potential family '" + family + "'", r.line_of("potential.family"),
                          "potential.family");
    }

    const std::string kind = r.get("initial.kind").value_or("delta");
    if (kind == "delta") {
        cfg.initial = InitialDelta{r.integers("initial.site", std::vector<int>(static_cast<std::size_t>(cfg.dimension), 0))};
    } else if (kind == "gaussian") {
        InitialGaussian gsn;
        gsn.center = r.integers("initial.center", std::vector<int>(static_cast<std::size_t>(cfg.dimension), 0));
        gsn.width = r.number("initial.width", 8.0);
        gsn.momentum = r.numbers("initial.momentum", {});
        cfg.initial = std::move(gsn);
    } else if (kind == "file") {
        cfg.initial = InitialFile{r.require("initial.path")};
    } else {
        throw ConfigError("unknown initial kind '" + kind + "'", r.line_of("initial.kind"), "initial.kind");
    }

    cfg.orders = r.numbers("moments.orders", {1.0, 2.0});
    cfg.ball_radii = r.integers("moments.ball_radii", {25});
    const std::string grid = r.get("moments.samples").value_or("log");
    if (grid == "log")
        cfg.samples.kind = SampleGridConfig::Kind::Log;
    else if (grid == "linear")
        cfg.samples.kind = SampleGridConfig::Kind::Linear;
    else if (grid == "list")
        cfg.samples.kind = SampleGridConfig::Kind::List;
    else
        throw ConfigError("unknown sample grid kind '" + grid + "'", r.line_of("moments.samples"), "moments.samples");
    cfg.samples.t_lo = r.number("moments.t_lo", 1.0);
    cfg.samples.t_hi = r.number_or_auto("moments.t_hi", -1.0);
    cfg.samples.count = static_cast<int>(r.integer("moments.count", 48));
    cfg.samples.values = r.numbers("moments.values", {});

    cfg.fit.t_lo = r.number("fit.t_lo", 10.0);
    cfg.fit.t_hi = r.number_or_auto("fit.t_hi", -1.0);
    cfg.fit.slope_tol = r.number("fit.slope_tol", 0.05);

    cfg.propagator.tau = r.number_or_auto("propagator.tau", -1.0);
    cfg.propagator.tolerance = r.number("propagator.tolerance", 1e-14);
    cfg.propagator.safety = r.number("propagator.safety", 0.9);

    cfg.spectral.enabled = r.boolean("spectral.enabled", false);
    cfg.spectral.theta = r.number("spectral.theta", 1.0);
    cfg.spectral.e0 = r.number("spectral.e0", 0.0);
    cfg.spectral.deltas = r.numbers("spectral.deltas", cfg.spectral.deltas);
    cfg.spectral.ipr_threshold = r.number_or_auto("spectral.ipr_threshold", -1.0);
    cfg.spectral.boundary_threshold = r.number("spectral.boundary_threshold", 0.05);
    cfg.spectral.dense_cap = r.integer("spectral.dense_cap", 4096);
    cfg.spectral.dump_eigs = r.boolean("spectral.dump_eigs", false);
    if (r.has("spectral.cross_i")) {
        auto vi = r.numbers("spectral.cross_i", {});
        auto vj = r.numbers("spectral.cross_j", {});
        if (vi.size() != 2 || vj.size() != 2)
            throw ConfigError("cross_i/cross_j need two endpoints", r.line_of("spectral.cross_i"), "spectral.cross_i");
        cfg.spectral.cross_i = {vi[0], vi[1]};
        cfg.spectral.cross_j = {vj[0], vj[1]};
    }

    auto opt_number = [&](const std::string& key) -> std::optional<double> {
        auto v = r.get(key);
        if (!v) return std::nullopt;
        return r.parse_number(key, *v);
    };
    cfg.expect.slope_r = opt_number("expect.slope_r");
    cfg.expect.slope_min = opt_number("expect.slope_min");
    cfg.expect.slope_max = opt_number("expect.slope_max");
    cfg.expect.ball_sup_min = opt_number("expect.ball_sup_min");
    if (auto v = opt_number("expect.ball_sup_radius")) cfg.expect.ball_sup_radius = static_cast<int>(*v);
    cfg.expect.ratio_band_max = opt_number("expect.ratio_band_max");

    r.reject_unknown();
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string join_doubles(std::span<const double> v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

std::string join_ints(std::span<const int> v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out;
}

} // namespace

std::string ExperimentConfig::serialize() const {
    std::ostringstream os;
    os << "[geometry]\n";
    os << "dimension = " << dimension << "\n";
    os << "radius = " << radius << "\n\n";

    os << "[potential]\n";
    os << "family = " << family_name(potential) << "\n";
    if (const auto* p = std::get_if<PowerLawPotential>(&potential)) {
        os << "c = " << format_double(p->c) << "\n";
        os << "alpha = " << format_double(p->alpha) << "\n";
    } else if (const auto* w = std::get_if<WignerVonNeumannPotential>(&potential)) {
        os << "c = " << format_double(w->c) << "\n";
        os << "k = " << format_double(w->k) << "\n";
    } else if (const auto* a = std::get_if<AndersonPotential>(&potential)) {
        os << "lambda = " << format_double(a->lambda) << "\n";
        if (potential_seed_explicit) os << "seed = " << a->seed << "\n";
    } else if (const auto* pp = std::get_if<PeriodicPotential>(&potential)) {
        os << "pattern = " << join_doubles(pp->pattern) << "\n";
    }
    os << "\n[initial]\n";
    if (const auto* dlt = std::get_if<InitialDelta>(&initial)) {
        os << "kind = delta\n";
        os << "site = " << join_ints(dlt->site) << "\n";
    } else if (const auto* gsn = std::get_if<InitialGaussian>(&initial)) {
        os << "kind = gaussian\n";
        os << "center = " << join_ints(gsn->center) << "\n";
        os << "width = " << format_double(gsn->width) << "\n";
        if (!gsn->momentum.empty()) os << "momentum = " << join_doubles(gsn->momentum) << "\n";
    } else {
        os << "kind = file\n";
        os << "path = " << std::get<InitialFile>(initial).path << "\n";
    }

    os << "\n[moments]\n";
    os << "orders = " << join_doubles(orders) << "\n";
    os << "ball_radii = " << join_ints(ball_radii) << "\n";
    os << "samples = "
       << (samples.kind == SampleGridConfig::Kind::Log ? "log"
           : samples.kind == SampleGridConfig::Kind::Linear ? "linear" : "list")
       << "\n";
    if (samples.kind == SampleGridConfig::Kind::List) {
        os << "values = " << join_doubles(samples.values) << "\n";
    } else {
        os << "t_lo = " << format_double(samples.t_lo) << "\n";
        os << "t_hi = " << (samples.t_hi < 0 ? std::string("auto") : format_double(samples.t_hi)) << "\n";
        os << "count = " << samples.count << "\n";
    }

    os << "\n[fit]\n";
    os << "t_lo = " << format_double(fit.t_lo) << "\n";
    os << "t_hi = " << (fit.t_hi < 0 ? std::string("auto") : format_double(fit.t_hi)) << "\n";
    os << "slope_tol = " << format_double(fit.slope_tol) << "\n";

    os << "\n[propagator]\n";
    os << "tau = " << (propagator.tau < 0 ? std::string("auto") : format_double(propagator.tau)) << "\n";
    os << "tolerance = " << format_double(propagator.tolerance) << "\n";
    os << "safety = " << format_double(propagator.safety) << "\n";

    os << "\n[spectral]\n";
    os << "enabled = " << (spectral.enabled ? "true" : "false") << "\n";
    if (spectral.enabled) {
        os << "theta = " << format_double(spectral.theta) << "\n";
        os << "e0 = " << format_double(spectral.e0) << "\n";
        os << "deltas = " << join_doubles(spectral.deltas) << "\n";
        os << "ipr_threshold = "
           << (spectral.ipr_threshold < 0 ? std::string("auto") : format_double(spectral.ipr_threshold)) << "\n";
        os << "boundary_threshold = " << format_double(spectral.boundary_threshold) << "\n";
        os << "dense_cap = " << spectral.dense_cap << "\n";
        os << "dump_eigs = " << (spectral.dump_eigs ? "true" : "false") << "\n";
        if (spectral.cross_i) {
            os << "cross_i = " << format_double(spectral.cross_i->first) << ", "
               << format_double(spectral.cross_i->second) << "\n";
            os << "cross_j = " << format_double(spectral.cross_j->first) << ", "
               << format_double(spectral.cross_j->second) << "\n";
        }
    }

    os << "\n[expect]\n";
    auto emit_opt = [&os](const char* key, const std::optional<double>& v) {
        if (v) os << key << " = " << format_double(*v) << "\n";
    };
    emit_opt("slope_r", expect.slope_r);
    emit_opt("slope_min", expect.slope_min);
    emit_opt("slope_max", expect.slope_max);
    emit_opt("ball_sup_min", expect.ball_sup_min);
    if (expect.ball_sup_radius) os << "ball_sup_radius = " << *expect.ball_sup_radius << "\n";
    emit_opt("ratio_band_max", expect.ratio_band_max);

    os << "\n[run]\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out << "\n";
    os << "dump_potential = " << (dump_potential ? "true" : "false") << "\n";
    return os.str();
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(serialize())); }

LatticeState build_initial_state(const ExperimentConfig& cfg, GeometryPtr geometry) {
    if (const auto* dlt = std::get_if<InitialDelta>(&cfg.initial)) {
        if (static_cast<int>(dlt->site.size()) != cfg.dimension)
            throw ConfigError("initial.site arity does not match dimension", 0, "initial.site");
        return LatticeState::delta(std::move(geometry), dlt->site);
    }
    if (const auto* gsn = std::get_if<InitialGaussian>(&cfg.initial)) {
        if (static_cast<int>(gsn->center.size()) != cfg.dimension)
            throw ConfigError("initial.center arity does not match dimension", 0, "initial.center");
        if (!gsn->momentum.empty() && static_cast<int>(gsn->momentum.size()) != cfg.dimension)
            throw ConfigError("initial.momentum arity does not match dimension", 0, "initial.momentum");
        return LatticeState::gaussian(std::move(geometry), gsn->center, gsn->width, gsn->momentum);
    }
    const auto& file = std::get<InitialFile>(cfg.initial);
    std::ifstream is(file.path);
    if (!is) throw ConfigError("cannot open initial state file " + file.path, 0, "initial.path");
    LatticeState s = read_state_csv(is, std::move(geometry));
    s.normalize();
    return s;
}

ResolvedRun validate_and_resolve(const ExperimentConfig& cfg) {
    ResolvedRun run;
    run.config = cfg;
    if (cfg.dimension < 1 || cfg.dimension > 3)
        throw ConfigError("geometry.dimension must be 1, 2 or 3", 0, "geometry.dimension");
    if (cfg.radius < 2) throw ConfigError("geometry.radius must be >= 2", 0, "geometry.radius");
    for (double r : cfg.orders)
        if (!(r >= 0 && r <= 3))
            throw ConfigError("moments.orders must lie in [0,3] (weights stay in double range)", 0, "moments.orders");
    if (!(cfg.propagator.tolerance > 0 && cfg.propagator.tolerance < 1))
        throw ConfigError("propagator.tolerance must lie in (0,1)", 0, "propagator.tolerance");
    if (!(cfg.propagator.safety > 0 && cfg.propagator.safety < 1))
        throw ConfigError("propagator.safety must lie in (0,1)", 0, "propagator.safety");
    if (!(cfg.fit.slope_tol > 0 && cfg.fit.slope_tol < 1))
        throw ConfigError("fit.slope_tol must lie in (0,1)", 0, "fit.slope_tol");

    GeometryPtr g;
    try {
        g = make_geometry(cfg.dimension, cfg.radius);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("geometry: ") + e.what(), 0, "geometry");
    }

    LatticeState initial = build_initial_state(cfg, g);
    run.initial_support = support_radius(initial);
    if (run.initial_support >= cfg.radius)
        throw ConfigError("initial state support reaches the box edge", 0, "initial");
    run.horizon = light_cone_horizon(*g, run.initial_support, cfg.propagator.safety);

    // Resolve the sample grid and enforce the horizon rule.
    std::vector<double>& ts = run.sample_times;
    if (cfg.samples.kind == SampleGridConfig::Kind::List) {
        ts = cfg.samples.values;
        if (ts.empty()) throw ConfigError("moments.values required for list grids", 0, "moments.values");
    } else {
        const double lo = cfg.samples.t_lo;
        const double hi = cfg.samples.t_hi < 0 ? run.horizon : cfg.samples.t_hi;
        const int count = cfg.samples.count;
        if (count < 2) throw ConfigError("moments.count must be >= 2", 0, "moments.count");
        if (!(lo >= 0) || !(hi > lo)) throw ConfigError("bad sample range", 0, "moments.t_lo");
        if (cfg.samples.kind == SampleGridConfig::Kind::Linear) {
            for (int i = 0; i < count; ++i) ts.push_back(lo + (hi - lo) * i / (count - 1));
        } else {
            if (!(lo > 0)) throw ConfigError("log grids require t_lo > 0", 0, "moments.t_lo");
            for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
        }
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0 || (i > 0 && ts[i] <= ts[i - 1]))
            throw ConfigError("sample times must be increasing and nonnegative", 0, "moments");
        if (ts[i] > run.horizon * (1 + 1e-12))
            throw ConfigError("sample time " + format_double(ts[i]) + " violates the light-cone horizon rule: t_max = " +
                                  format_double(run.horizon) + " = safety*(L - support)/(2d)",
                              0, "moments.t_hi");
    }

    run.fit_lo = cfg.fit.t_lo;
    run.fit_hi = cfg.fit.t_hi < 0 ? 0.8 * run.horizon : cfg.fit.t_hi;
    if (!(run.fit_lo >= 1) || !(run.fit_hi > run.fit_lo))
        throw ConfigError("fit window must satisfy 1 <= t_lo < t_hi", 0, "fit.t_lo");
    int in_window = 0;
    for (double t : ts)
        if (t >= run.fit_lo && t <= run.fit_hi) ++in_window;
    if (in_window < 8)
        throw ConfigError("fit window [" + format_double(run.fit_lo) + ", " + format_double(run.fit_hi) +
                              "] holds only " + std::to_string(in_window) + " samples; fits need >= 8",
                          0, "fit.t_lo");

    const double vsup = realize(cfg.potential, g).sup_norm();
    const double half_width = 2.0 * cfg.dimension + vsup + 1e-6 * (4.0 * cfg.dimension + 2.0 * vsup);
    run.tau = cfg.propagator.tau < 0 ? 20.0 / half_width : cfg.propagator.tau;
    if (!(run.tau > 0)) throw ConfigError("propagator.tau must be positive", 0, "propagator.tau");

    if (cfg.spectral.enabled) {
        if (g->total_sites() > cfg.spectral.dense_cap)
            throw ConfigError("spectral experiments need total_sites <= dense_cap (" +
                                  std::to_string(g->total_sites()) + " > " + std::to_string(cfg.spectral.dense_cap) +
                                  ")",
                              0, "spectral.dense_cap");
        if (!(cfg.spectral.theta > 0 && cfg.spectral.theta <= 2.0 * cfg.dimension))
            throw ConfigError("spectral.theta must lie in (0, 2d]", 0, "spectral.theta");
        run.ipr_threshold = cfg.spectral.ipr_threshold < 0 ? 10.0 / static_cast<double>(g->total_sites())
                                                           : cfg.spectral.ipr_threshold;
        if (!(run.ipr_threshold > 0 && run.ipr_threshold < 1))
            throw ConfigError("spectral.ipr_threshold must lie in (0,1)", 0, "spectral.ipr_threshold");
        if (!(cfg.spectral.boundary_threshold > 0 && cfg.spectral.boundary_threshold < 1))
            throw ConfigError("spectral.boundary_threshold must lie in (0,1)", 0, "spectral.boundary_threshold");
    }
    if (std::holds_alternative<WignerVonNeumannPotential>(cfg.potential) && cfg.dimension != 1)
        throw ConfigError("wigner_von_neumann potentials require d = 1", 0, "potential.family");
    return run;
}

} // namespace ballistic
