// Acceptance suite: one criterion per entry, each printing a PASS/FAIL line
// with its measured margin. Exit code = number of failed criteria.

#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <sstream>

#include "ballistic/io.hpp"
#include "ballistic/runner.hpp"
#include "ballistic/transport.hpp"
#include "ballistic/util.hpp"

using namespace ballistic;

namespace {

struct CriterionResult {
    bool pass = true;
    bool informational_tail = false;
    std::string detail;
};

struct NamedRun {
    std::string name;
    Hamiltonian h;
    LatticeState initial;
    MomentSeries series;
};

// Shared measurement context: criteria 8/9 reuse the series of criteria 4-7
// when the whole suite runs in one process.
struct Cache {
    std::optional<double> c1_hat_d1;
    std::optional<std::vector<NamedRun>> runs;
};
Cache g_cache;

MomentSeries sweep_series(const Hamiltonian& h, const LatticeState& u, double t_lo, double t_hi, int count,
                          std::vector<double> orders, std::vector<int> radii) {
    ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
    const double horizon = light_cone_horizon(h.geometry(), support_radius(u), 0.9);
    std::vector<double> times;
    for (int i = 0; i < count; ++i) times.push_back(t_lo * std::pow(t_hi / t_lo, double(i) / (count - 1)));
    return record_moments(h, prop, u, orders, times, radii, horizon);
}

double c1_from_criterion2() {
    if (!g_cache.c1_hat_d1) {
        auto g = make_geometry(1, 200);
        g_cache.c1_hat_d1 = commutator_q_h_norm(free_hamiltonian(g), 4000).value;
    }
    return *g_cache.c1_hat_d1;
}

LatticeState band_center_gaussian(GeometryPtr g, double width) {
    std::vector<int> center(static_cast<std::size_t>(g->dimension()), 0);
    std::vector<double> momentum(static_cast<std::size_t>(g->dimension()), M_PI / 2.0);
    return LatticeState::gaussian(std::move(g), center, width, momentum);
}

const std::vector<NamedRun>& runs_4_to_7() {
    if (!g_cache.runs) {
        std::vector<NamedRun> runs;
        { // criterion 4 shape: free, L = 2048, delta_0
            auto g = make_geometry(1, 2048);
            Hamiltonian h = free_hamiltonian(g);
            int origin[] = {0};
            LatticeState u = LatticeState::delta(g, origin);
            MomentSeries s = sweep_series(h, u, 1.0, 450.0, 64, {0.5, 1.0, 2.0}, {25});
            runs.push_back({"free_L2048", std::move(h), std::move(u), std::move(s)});
        }
        { // criterion 5 shape: power_law(1,2), L = 8192, band-center gaussian
            auto g = make_geometry(1, 8192);
            Hamiltonian h(realize(PowerLawPotential{1.0, 2.0}, g));
            LatticeState u = band_center_gaussian(g, 8.0);
            const double horizon = light_cone_horizon(*g, support_radius(u), 0.9);
            MomentSeries s = sweep_series(h, u, 1.0, 0.8 * horizon, 72, {0.5, 1.0, 2.0}, {25});
            runs.push_back({"powerlaw_L8192", std::move(h), std::move(u), std::move(s)});
        }
        { // criterion 6 shape: alpha sweep at L = 4096
            for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0}) {
                auto g = make_geometry(1, 4096);
                Hamiltonian h(realize(PowerLawPotential{1.0, alpha}, g));
                LatticeState u = band_center_gaussian(g, 8.0);
                const double horizon = light_cone_horizon(*g, support_radius(u), 0.9);
                MomentSeries s = sweep_series(h, u, 1.0, 0.8 * horizon, 56, {0.5, 1.0, 2.0}, {25});
                runs.push_back({"alpha_" + format_double(alpha), std::move(h), std::move(u), std::move(s)});
            }
        }
        { // criterion 7 shape: anderson lambda = 8, L = 2048
            auto g = make_geometry(1, 2048);
            Hamiltonian h(realize(AndersonPotential{8.0, 7}, g));
            int origin[] = {0};
            LatticeState u = LatticeState::delta(g, origin);
            MomentSeries s = sweep_series(h, u, 1.0, 250.0, 48, {0.5, 1.0, 2.0}, {25});
            runs.push_back({"anderson_L2048", std::move(h), std::move(u), std::move(s)});
        }
        g_cache.runs = std::move(runs);
    }
    return *g_cache.runs;
}

// --------------------------------------------------------------- criteria

CriterionResult criterion_01() {
    double worst = 0;
    for (auto [d, L] : std::vector<std::pair<int, int>>{{1, 50}, {2, 12}}) {
        auto g = make_geometry(d, L);
        Hamiltonian h = free_hamiltonian(g);
        for (std::uint64_t s = 0; s < 100; ++s) {
            LatticeState psi = LatticeState::random_normalized(g, 100 * d + s);
            LatticeState lhs = apply_double_commutator(h, psi);
            LatticeState rhs = apply_double_commutator_bulk(h, psi);
            for (std::int64_t i = 0; i < g->total_sites(); ++i) {
                bool interior = true;
                for (int c : g->site_of(i))
                    if (std::abs(c) > L - 2) interior = false;
                if (interior) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
            }
        }
    }
    return {worst <= 1e-12, false,
            "max interior defect " + format_double(worst) + " (tol 1e-12, d=1 L=50 + d=2 L=12, 100 states each)"};
}

CriterionResult criterion_02() {
    double worst_excess = -1e300, worst_value = 0;
    for (int d : {1, 2}) {
        auto g = make_geometry(d, 200);
        const double bound = 2.0 * d * std::sqrt(5.0) + 1e-9;
        std::vector<PotentialSpec> suite = {ZeroPotential{}, PowerLawPotential{1.0, 2.0}, AndersonPotential{4.0, 7},
                                            PeriodicPotential{{0.0, 1.0, 0.5}}};
        if (d == 1) suite.push_back(WignerVonNeumannPotential{1.0, 1.0});
        for (const auto& spec : suite) {
            Hamiltonian h(realize(spec, g));
            NormEstimate est = commutator_q_h_norm(h, d == 1 ? 4000 : 500);
            worst_excess = std::max(worst_excess, est.value - bound);
            worst_value = std::max(worst_value, est.value);
        }
    }
    return {worst_excess <= 0, false,
            "max estimate " + format_double(worst_value) + ", worst excess over 2d sqrt(5)+1e-9: " +
                format_double(worst_excess)};
}

CriterionResult criterion_03() {
    double worst_oracle = 0, worst_unit = 0, worst_rev = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int L = 150 + 13 * trial; // 301..~540 sites, capped below
        auto g = make_geometry(1, std::min(L, 255));
        const double lambda = 0.5 + 0.15 * trial;
        Hamiltonian h(realize(AndersonPotential{lambda, 300 + static_cast<std::uint64_t>(trial)}, g));
        SpectralDecomposition dec = dense_eigendecomposition(h);
        LatticeState psi = LatticeState::random_normalized(g, 40 + static_cast<std::uint64_t>(trial));
        const double t = 2.5 * (trial + 1); // up to t = 50
        ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
        LatticeState cheb = psi;
        prop.advance(cheb, t);
        worst_unit = std::max(worst_unit, std::abs(cheb.norm() - 1.0));
        LatticeState oracle = dense_oracle_propagate(dec, psi, t);
        double diff2 = 0;
        for (std::int64_t i = 0; i < g->total_sites(); ++i) diff2 += std::norm(cheb[i] - oracle[i]);
        worst_oracle = std::max(worst_oracle, std::sqrt(diff2));
        LatticeState back = cheb;
        for (auto& a : back.amplitudes()) a = std::conj(a);
        prop.advance(back, t);
        for (auto& a : back.amplitudes()) a = std::conj(a);
        diff2 = 0;
        for (std::int64_t i = 0; i < g->total_sites(); ++i) diff2 += std::norm(back[i] - psi[i]);
        worst_rev = std::max(worst_rev, std::sqrt(diff2));
    }
    const bool pass = worst_oracle <= 1e-10 && worst_unit <= 1e-11 && worst_rev <= 1e-9;
    return {pass, false,
            "oracle diff " + format_double(worst_oracle) + " (tol 1e-10), unitarity " + format_double(worst_unit) +
                " (1e-11), reversal " + format_double(worst_rev) + " (1e-9), 20 triples"};
}

CriterionResult criterion_04() {
    const NamedRun& run = runs_4_to_7()[0];
    double worst_rel = 0;
    const std::size_t c1 = run.series.order_index(1.0);
    for (std::size_t i = 0; i < run.series.times.size(); ++i) {
        const double t = run.series.times[i];
        const double m2 = run.series.norms[i][c1] * run.series.norms[i][c1] - 1.0; // ||psi||_1^2 = 1 + sum n^2 |psi|^2
        worst_rel = std::max(worst_rel, std::abs(m2 - 2.0 * t * t) / (2.0 * t * t));
    }
    ExponentFit fit = fit_transport_exponent(run.series, 1.0, 10.0, 400.0);
    const bool pass = worst_rel <= 1e-3 && std::abs(fit.slope - 1.0) <= 0.02;
    return {pass, false,
            "second-moment defect " + format_double(worst_rel) + " (tol 1e-3), slope " + format_double(fit.slope) +
                " (1.00 +- 0.02)"};
}

CriterionResult criterion_05() {
    const NamedRun& run = runs_4_to_7()[1];
    const double horizon = run.series.horizon;
    std::ostringstream detail;
    bool pass = true;
    for (double r : {0.5, 1.0, 2.0}) {
        ExponentFit fit = fit_transport_exponent(run.series, r, 10.0, 0.8 * horizon);
        detail << "r=" << format_double(r) << ": slope " << format_double(fit.slope);
        if (!(fit.slope >= 0.95 && fit.slope <= 1.05)) pass = false;
        if (r == 1.0) {
            const double band = fit.ratio_max / fit.ratio_min;
            detail << " band " << format_double(band);
            if (band > 4.0) pass = false;
        }
        detail << "  ";
    }
    return {pass, false, detail.str() + "(slopes in [0.95,1.05], band <= 4)"};
}

CriterionResult criterion_06() {
    const auto& runs = runs_4_to_7();
    std::vector<std::pair<double, double>> slopes; // (alpha, slope)
    for (const auto& run : runs) {
        if (run.name.rfind("alpha_", 0) != 0) continue;
        const double alpha = parse_double(run.name.substr(6));
        ExponentFit fit = fit_transport_exponent(run.series, 1.0, 10.0, 0.8 * run.series.horizon);
        slopes.emplace_back(alpha, fit.slope);
    }
    std::sort(slopes.begin(), slopes.end());
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        detail << "a=" << format_double(slopes[i].first) << ": " << format_double(slopes[i].second) << "  ";
        if (slopes[i].first >= 1.5 && slopes[i].second < 0.95) pass = false;
        if (i > 0 && slopes[i].second < slopes[i - 1].second - 0.03) pass = false;
    }
    return {pass, false, detail.str() + "(>= 0.95 for alpha >= 1.5, monotone within 0.03)"};
}

CriterionResult criterion_07() {
    const NamedRun& run = runs_4_to_7().back();
    ExponentFit fit = fit_transport_exponent(run.series, 1.0, 10.0, 200.0);
    const std::size_t col = run.series.radius_index(25);
    double sup = 0;
    for (const auto& row : run.series.ball) sup = std::max(sup, row[col]);
    const bool pass = fit.slope <= 0.1 && sup >= 0.9;
    return {pass, false,
            "slope " + format_double(fit.slope) + " (<= 0.1), sup in-ball(25) " + format_double(sup) + " (>= 0.9)"};
}

CriterionResult criterion_08() {
    const double c1 = c1_from_criterion2();
    double worst = -1e300;
    int violations = 0;
    for (const auto& run : runs_4_to_7()) {
        UpperBoundReport rep = check_upper_bounds(run.series, run.h, run.initial, c1);
        worst = std::max(worst, rep.order1_worst_margin);
        if (rep.order1_violation) ++violations;
    }
    return {violations == 0, false,
            "violations " + std::to_string(violations) + ", worst margin " + format_double(worst) +
                " with c1 = " + format_double(c1)};
}

CriterionResult criterion_09() {
    const double c1 = c1_from_criterion2();
    const double threshold = 0.5 * c1 * 1.05;
    double worst_c2 = 0;
    std::string worst_run;
    for (const auto& run : runs_4_to_7()) {
        UpperBoundReport rep = check_upper_bounds(run.series, run.h, run.initial, c1);
        if (rep.c2_min > worst_c2) {
            worst_c2 = rep.c2_min;
            worst_run = run.name;
        }
    }
    const bool pass = worst_c2 <= threshold;
    std::string detail = "minimal admissible c2 " + format_double(worst_c2) + " (" + worst_run + ") vs c1/2 + 5% = " +
                         format_double(threshold);
    if (!pass)
        detail += "; the free-lattice moments pin c2 at sqrt(<v^4>) (= sqrt(6) for delta_0, ~4 at band center), "
                  "which exceeds any c1/2 with c1 = ||[Q,H]|| ~ 2d";
    return {pass, false, detail};
}

CriterionResult criterion_10() {
    bool pass = true;
    std::ostringstream detail;
    {
        auto g = make_geometry(1, 200);
        Hamiltonian h = free_hamiltonian(g);
        SpectralDecomposition dec = dense_eigendecomposition(h);
        for (double theta : {0.5, 1.0, 2.0}) {
            MourreFormResult res = mourre_form_min(dec, h, EnergyInterval::j_theta(theta, 1));
            const double symbol = 8.0 * theta * (1.0 - theta / 4.0);
            detail << "th=" << format_double(theta) << ": " << format_double(res.min_rayleigh) << "  ";
            if (res.min_rayleigh < 2.0 * theta || std::abs(res.min_rayleigh - symbol) / symbol > 0.05) pass = false;
        }
    }
    {
        auto g = make_geometry(2, 20);
        Hamiltonian h = free_hamiltonian(g);
        SpectralDecomposition dec = dense_eigendecomposition(h);
        MourreFormResult res = mourre_form_min(dec, h, EnergyInterval::j_theta(1.0, 2));
        detail << "| d=2 th=1 reported: " << format_double(res.min_rayleigh)
               << " (near 0 as expected; logged, not asserted)";
    }
    return {pass, false, detail.str()};
}

CriterionResult criterion_11() {
    auto g = make_geometry(1, 300);
    Hamiltonian h(realize(PowerLawPotential{1.0, 2.0}, g));
    SpectralDecomposition full = dense_eigendecomposition(h);
    SpectralDecomposition freed = dense_eigendecomposition(free_hamiltonian(g));
    const EnergyInterval base = EnergyInterval::j_theta(1.0, 1);
    const std::vector<double> deltas = {1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
    auto rows = shrink_interval_scan(freed, full, h, base, 0.0, deltas, 1.0);
    for (const auto& row : rows) {
        if (row.compact_norm <= 0.5 && row.certified_bound >= 0.5) {
            return {true, false,
                    "delta " + format_double(row.delta) + ": ||chi K chi|| = " + format_double(row.compact_norm) +
                        " <= 1/2, certified bound " + format_double(row.certified_bound) + " >= theta/2"};
        }
    }
    return {false, false, "no delta in the grid reached norm <= 1/2 with a certified bound >= theta/2"};
}

CriterionResult criterion_12() {
    auto g = make_geometry(1, 100);
    Hamiltonian h = free_hamiltonian(g);
    SpectralDecomposition dec = dense_eigendecomposition(h);
    LatticeState u = band_center_gaussian(g, 6.0);
    const std::vector<double> tgrid = {0.0, 1.0, 2.0, 4.0, 7.0, 10.0};
    HeisenbergCheck res = heisenberg_expansion_check(dec, h, EnergyInterval::j_theta(1.0, 1), u, tgrid);
    const bool pass = res.max_defect <= 1e-6 && res.integral_margin >= 0.0 && res.max_im <= 1e-9;
    return {pass, false,
            "defect " + format_double(res.max_defect) + " (tol 1e-6), integral margin " +
                format_double(res.integral_margin) + " (>= 0 vs theta_eff/2 = " + format_double(res.theta_eff / 2) +
                "), imag " + format_double(res.max_im)};
}

CriterionResult criterion_13() {
    auto g = make_geometry(1, 48);
    MomentSeries random_states;
    random_states.orders = {0.5, 1.0, 1.5, 2.0};
    random_states.horizon = 1e9;
    for (int i = 0; i < 1000; ++i) {
        LatticeState psi = LatticeState::random_normalized(g, 9000 + static_cast<std::uint64_t>(i));
        random_states.times.push_back(i + 1.0);
        random_states.norm0.push_back(psi.norm());
        std::vector<double> row;
        for (double r : random_states.orders) row.push_back(weighted_norm(psi, r));
        random_states.norms.push_back(std::move(row));
        random_states.ball.push_back({});
    }
    MomentInequalityReport rep = check_moment_inequalities(random_states);
    int violations = rep.jensen_violations + rep.interp_violations;
    double worst = std::min(rep.jensen_worst_slack, rep.interp_worst_slack);
    int checks = rep.jensen_checks + rep.interp_checks;
    for (const auto& run : runs_4_to_7()) {
        MomentInequalityReport r2 = check_moment_inequalities(run.series);
        violations += r2.jensen_violations + r2.interp_violations;
        worst = std::min({worst, r2.jensen_worst_slack, r2.interp_worst_slack});
        checks += r2.jensen_checks + r2.interp_checks;
    }
    return {violations == 0, false,
            std::to_string(checks) + " checks, " + std::to_string(violations) + " violations, worst slack " +
                format_double(worst) + " (allowed -1e-12)"};
}

CriterionResult criterion_14() {
    ExperimentConfig cfg;
    cfg.dimension = 1;
    cfg.radius = 256;
    cfg.potential = PowerLawPotential{1.0, 2.0};
    cfg.initial = InitialGaussian{{0}, 4.0, {M_PI / 2}};
    cfg.orders = {0.5, 1.0, 2.0};
    cfg.ball_radii = {10, 25};
    cfg.samples.kind = SampleGridConfig::Kind::Log;
    cfg.samples.t_lo = 1;
    cfg.samples.t_hi = -1;
    cfg.samples.count = 32;
    cfg.seed = 21;
    const auto base = std::filesystem::temp_directory_path() / "ballistic_acceptance";
    std::filesystem::remove_all(base);
    RunResult r1 = run_experiment(cfg, base / "run1");
    RunResult r2 = run_experiment(cfg, base / "run2");
    bool pass = r1.exit_code == 0 && r2.exit_code == 0 && r1.checksums == r2.checksums && !r1.checksums.empty();
    for (const auto& [name, sum] : r1.checksums) {
        if (read_text_file(base / "run1" / name) != read_text_file(base / "run2" / name)) pass = false;
        (void)sum;
    }
    return {pass, false,
            std::to_string(r1.checksums.size()) + " output files, checksums " +
                (r1.checksums == r2.checksums ? "identical" : "DIFFER")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<CriterionResult()> fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "double-commutator identity on interior sites", criterion_01},
        {2, "commutator norm bound ||[Q,H]|| <= 2d sqrt(5)", criterion_02},
        {3, "propagator oracle equivalence / unitarity / reversal", criterion_03},
        {4, "free ballistic law 2t^2 and exponent 1.00 +- 0.02", criterion_04},
        {5, "decaying-potential exponents and ratio band (L = 8192)", criterion_05},
        {6, "hypothesis-boundary alpha sweep (L = 4096)", criterion_06},
        {7, "anderson localization control (L = 2048)", criterion_07},
        {8, "order-1 envelope: zero violations across runs 4-7", criterion_08},
        {9, "order-2 envelope: minimal c2 <= c1/2 + 5%", criterion_09},
        {10, "mourre window minimum: d=1 asserted, d=2 reported", criterion_10},
        {11, "compact-perturbation window shrinking scan", criterion_11},
        {12, "heisenberg expansion identity and integral lower bound", criterion_12},
        {13, "jensen + interpolation moment inequality suites", criterion_13},
        {14, "byte-identical reruns (manifest checksum equality)", criterion_14},
    };
    return list;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--list") == 0) {
            for (const auto& c : criteria()) std::printf("%02d %s\n", c.id, c.name);
            return 0;
        }
    }
    int failed = 0;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        CriterionResult res;
        try {
            res = c.fn();
        } catch (const std::exception& e) {
            res = {false, false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %02d %s: %s\n", res.pass ? "PASS" : "FAIL", c.id, c.name, res.detail.c_str());
        std::fflush(stdout);
        if (!res.pass) ++failed;
    }
    return failed;
}
