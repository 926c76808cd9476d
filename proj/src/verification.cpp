#include "ballistic/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ballistic/propagation.hpp"
#include "ballistic/transport.hpp"
#include "ballistic/util.hpp"

namespace ballistic {

namespace {

std::vector<PotentialSpec> generator_suite(std::uint64_t seed) {
    return {ZeroPotential{}, PowerLawPotential{1.0, 2.0}, AndersonPotential{4.0, seed},
            PeriodicPotential{{0.0, 1.0, 0.5}}};
}

CheckResult check(std::string suite, std::string name, double measured, double threshold, bool pass,
                  std::string detail = {}) {
    return CheckResult{std::move(suite), std::move(name), pass, false, measured, threshold, std::move(detail)};
}

CheckResult info(std::string suite, std::string name, double measured, std::string detail = {}) {
    return CheckResult{std::move(suite), std::move(name), true, true, measured, 0, std::move(detail)};
}

// ---------------------------------------------------------------- operators

void verify_operators(std::vector<CheckResult>& out) {
    const std::string suite = "operators";

    { // bijection round-trip, d in {1,2,3}, L <= 8
        bool ok = true;
        for (int d = 1; d <= 3 && ok; ++d) {
            auto g = make_geometry(d, d == 3 ? 4 : 8);
            for (std::int64_t i = 0; i < g->total_sites() && ok; ++i) {
                auto site = g->site_of(i);
                auto back = g->index_of(site);
                ok = back && *back == i;
            }
        }
        out.push_back(check(suite, "site-index bijection round-trip (d=1..3)", ok ? 0 : 1, 0, ok));
    }
    { // weighted norm at r = 0 vs direct l2 sum
        auto g = make_geometry(1, 300);
        double worst = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            LatticeState psi = LatticeState::random_normalized(g, 1000 + s);
            worst = std::max(worst, std::abs(weighted_norm(psi, 0.0) - psi.norm()) / psi.norm());
        }
        out.push_back(check(suite, "weighted_norm(r=0) equals the l2 norm", worst, 1e-14, worst <= 1e-14));
    }
    { // free double-commutator identity on interior sites
        double worst = 0;
        for (int d : {1, 2}) {
            for (int L : d == 1 ? std::vector<int>{12, 30, 50} : std::vector<int>{12, 20}) {
                auto g = make_geometry(d, L);
                Hamiltonian h = free_hamiltonian(g);
                for (std::uint64_t s = 0; s < 25; ++s) {
                    LatticeState psi = LatticeState::random_normalized(g, 17 * s + 3);
                    LatticeState lhs = apply_double_commutator(h, psi);
                    LatticeState rhs = apply_double_commutator_bulk(h, psi);
                    const auto n2 = g->norm2_table();
                    const double interior = double(L - 2) * (L - 2);
                    bool edge_coord = false;
                    for (std::int64_t i = 0; i < g->total_sites(); ++i) {
                        auto site = g->site_of(i);
                        edge_coord = false;
                        for (int c : site)
                            if (std::abs(c) > L - 2) edge_coord = true;
                        if (!edge_coord) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
                    }
                    (void)n2;
                    (void)interior;
                }
            }
        }
        out.push_back(check(suite, "free [H,[H,-Q^2]] = 2 sum(4I - Dj^2) on interior sites", worst, 1e-12,
                            worst <= 1e-12));
    }
    { // commutator norm bound over the generator suite
        double worst_excess = -1e300;
        double worst_value = 0;
        for (int d : {1, 2}) {
            auto g = make_geometry(d, d == 1 ? 200 : 60);
            const double bound = 2.0 * d * std::sqrt(5.0) + 1e-9;
            for (const auto& spec : generator_suite(7)) {
                Hamiltonian h(realize(spec, g));
                NormEstimate est = commutator_q_h_norm(h, 1200);
                worst_excess = std::max(worst_excess, est.value - bound);
                worst_value = std::max(worst_value, est.value);
            }
        }
        out.push_back(check(suite, "power-iteration ||[Q,H]|| <= 2d sqrt(5) + 1e-9", worst_value, 0,
                            worst_excess <= 0, "worst excess " + format_double(worst_excess)));
    }
    { // Jacobi consistency against the dense bracket
        auto g = make_geometry(1, 100); // 201 sites <= 512
        Hamiltonian h(realize(PowerLawPotential{1.0, 2.0}, g));
        DenseOperator dh = materialize_dense([&](const LatticeState& s) { return apply_hamiltonian(h, s); }, g, "H");
        DenseOperator dq2 = materialize_dense([](const LatticeState& s) { return apply_q_squared(s); }, g, "Q^2");
        DenseOperator ddc =
            materialize_dense([&](const LatticeState& s) { return apply_double_commutator(h, s); }, g, "[H,[H,-Q^2]]");
        Eigen::MatrixXd inner = dh.mat * (-dq2.mat) - (-dq2.mat) * dh.mat;
        Eigen::MatrixXd outer = dh.mat * inner - inner * dh.mat;
        const double scale = outer.cwiseAbs().maxCoeff();
        const double defect = (outer - ddc.mat).cwiseAbs().maxCoeff();
        out.push_back(check(suite, "dense([H,[H,-Q^2]]) equals the nested dense bracket", defect, 1e-10 * scale,
                            defect <= 1e-10 * scale));
    }
    { // symmetry structure of the materialized brackets
        auto g = make_geometry(1, 60);
        Hamiltonian h(realize(PeriodicPotential{{0.3, -0.4}}, g));
        DenseOperator dil = materialize_dense([&](const LatticeState& s) { return apply_dilation(h, s); }, g,
                                              "[H,-Q^2]");
        DenseOperator dc = materialize_dense([&](const LatticeState& s) { return apply_double_commutator(h, s); }, g,
                                             "[H,[H,-Q^2]]");
        const double anti = (dil.mat + dil.mat.transpose()).cwiseAbs().maxCoeff();
        const double sym = (dc.mat - dc.mat.transpose()).cwiseAbs().maxCoeff();
        const double worst = std::max(anti, sym);
        out.push_back(check(suite, "dense([H,-Q^2]) antisymmetric, dense([H,[H,-Q^2]]) symmetric", worst, 1e-13,
                            worst <= 1e-13));
    }
    { // measured [H,Q^m] Q^{-(m-1)} constants (reported, not asserted)
        auto g = make_geometry(1, 400);
        Hamiltonian h = free_hamiltonian(g);
        std::string detail;
        double last = 0;
        for (int m = 1; m <= 3; ++m) {
            NormEstimate est = hqm_ratio_norm(h, m, 1500);
            detail += "m=" + std::to_string(m) + ": " + format_double(est.value) + "  ";
            last = est.value;
        }
        out.push_back(info(suite, "||[H,Q^m] Q^{-(m-1)}|| measured, m = 1..3", last, detail));
    }
}

// -------------------------------------------------------------- propagation

void verify_propagation(std::vector<CheckResult>& out) {
    const std::string suite = "propagation";
    auto g = make_geometry(1, 255); // 511 sites, within the dense cap
    std::vector<std::pair<std::string, PotentialSpec>> cases = {
        {"free", ZeroPotential{}}, {"power_law", PowerLawPotential{1.0, 2.0}}, {"anderson", AndersonPotential{2.0, 11}}};

    double worst_unitarity = 0, worst_reversal = 0, worst_semigroup = 0, worst_oracle = 0;
    for (const auto& [name, spec] : cases) {
        Hamiltonian h(realize(spec, g));
        SpectralDecomposition dec = dense_eigendecomposition(h);
        ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
        for (std::uint64_t s = 0; s < 7; ++s) {
            LatticeState psi0 = LatticeState::random_normalized(g, 31 * s + 5);
            const double t = 5.0 + 2.0 * static_cast<double>(s);
            LatticeState psi = psi0;
            prop.advance(psi, t);
            worst_unitarity = std::max(worst_unitarity, std::abs(psi.norm() - 1.0));
            { // oracle equivalence
                LatticeState oracle = dense_oracle_propagate(dec, psi0, t);
                double diff2 = 0;
                for (std::int64_t i = 0; i < g->total_sites(); ++i) diff2 += std::norm(psi[i] - oracle[i]);
                worst_oracle = std::max(worst_oracle, std::sqrt(diff2));
            }
            { // time reversal: H is real, so conjugation flips the arrow of time
                LatticeState back = psi;
                for (auto& a : back.amplitudes()) a = std::conj(a);
                prop.advance(back, t);
                for (auto& a : back.amplitudes()) a = std::conj(a);
                double diff2 = 0;
                for (std::int64_t i = 0; i < g->total_sites(); ++i) diff2 += std::norm(back[i] - psi0[i]);
                worst_reversal = std::max(worst_reversal, std::sqrt(diff2));
            }
            { // semigroup: many small steps vs one big step
                LatticeState a = psi0, b = psi0;
                const ChebyshevPlan big = plan_chebyshev(prop.bounds(), 4.0, 1e-14);
                const ChebyshevPlan small = plan_chebyshev(prop.bounds(), 1.0, 1e-14);
                b = propagate(h, big, b);
                for (int k = 0; k < 4; ++k) a = propagate(h, small, a);
                double diff2 = 0;
                for (std::int64_t i = 0; i < g->total_sites(); ++i) diff2 += std::norm(a[i] - b[i]);
                worst_semigroup = std::max(worst_semigroup, std::sqrt(diff2));
            }
        }
    }
    out.push_back(check(suite, "unitarity ||psi(t)|| drift", worst_unitarity, 1e-11, worst_unitarity <= 1e-11));
    out.push_back(check(suite, "time-reversal return defect", worst_reversal, 1e-9, worst_reversal <= 1e-9));
    out.push_back(check(suite, "semigroup n steps of tau vs one step of n tau", worst_semigroup, 1e-9,
                        worst_semigroup <= 1e-9));
    out.push_back(
        check(suite, "chebyshev vs dense-oracle propagation (l2)", worst_oracle, 1e-10, worst_oracle <= 1e-10));

    { // free second moment law pins the ballistic constant
        auto g2 = make_geometry(1, 1024);
        Hamiltonian h = free_hamiltonian(g2);
        ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
        int origin[] = {0};
        LatticeState psi = LatticeState::delta(g2, origin);
        const double horizon = light_cone_horizon(*g2, 0, 0.9);
        double worst = 0;
        double prev = 0;
        for (double t : {1.0, 2.0, 5.0, 10.0, 50.0, 150.0, 300.0, horizon}) {
            prop.advance(psi, t - prev);
            prev = t;
            const double m2 = second_moment(psi);
            worst = std::max(worst, std::abs(m2 - 2.0 * t * t) / (2.0 * t * t));
        }
        out.push_back(check(suite, "free second moment = 2 t^2 (relative)", worst, 1e-3, worst <= 1e-3));
    }
}

// ----------------------------------------------------------------- spectral

void verify_spectral(std::vector<CheckResult>& out) {
    const std::string suite = "spectral";
    auto g = make_geometry(1, 128);
    Hamiltonian h(realize(PowerLawPotential{1.0, 2.0}, g));
    SpectralDecomposition dec = dense_eigendecomposition(h);

    { // projector algebra
        const EnergyInterval a(-1.5, -0.5), b(0.5, 1.5);
        double worst = 0;
        for (std::uint64_t s = 0; s < 5; ++s) {
            LatticeState u = LatticeState::random_normalized(g, 900 + s);
            LatticeState pa = spectral_projection_apply(dec, a, u);
            LatticeState paa = spectral_projection_apply(dec, a, pa);
            double idem = 0;
            for (std::int64_t i = 0; i < g->total_sites(); ++i) idem += std::norm(paa[i] - pa[i]);
            worst = std::max(worst, std::sqrt(idem));
            LatticeState pb = spectral_projection_apply(dec, b, u);
            worst = std::max(worst, std::abs(inner_product(pa, pb)));
            LatticeState whole = spectral_projection_apply(dec, EnergyInterval::whole_line(), u);
            double comp = 0;
            for (std::int64_t i = 0; i < g->total_sites(); ++i) comp += std::norm(whole[i] - u[i]);
            worst = std::max(worst, std::sqrt(comp));
            LatticeState v = LatticeState::random_normalized(g, 1900 + s);
            worst = std::max(worst,
                             std::abs(inner_product(spectral_projection_apply(dec, a, u), v) -
                                      inner_product(u, spectral_projection_apply(dec, a, v))));
        }
        out.push_back(check(suite, "projector algebra (idempotent, orthogonal, complete, self-adjoint)", worst, 1e-12,
                            worst <= 1e-12));
    }
    { // commutation with the evolution
        double worst = 0;
        const EnergyInterval w(-1.0, 1.0);
        for (double t : {3.0, 10.0}) {
            LatticeState u = LatticeState::random_normalized(g, 77);
            LatticeState a = dense_oracle_propagate(dec, spectral_projection_apply(dec, w, u), t);
            LatticeState b = spectral_projection_apply(dec, w, dense_oracle_propagate(dec, u, t));
            double diff = 0;
            for (std::int64_t i = 0; i < g->total_sites(); ++i) diff += std::norm(a[i] - b[i]);
            worst = std::max(worst, std::sqrt(diff));
        }
        out.push_back(check(suite, "projection commutes with the evolution", worst, 1e-11, worst <= 1e-11));
    }
    { // free Mourre lower bound in d = 1
        auto g200 = make_geometry(1, 200);
        Hamiltonian hf = free_hamiltonian(g200);
        SpectralDecomposition fdec = dense_eigendecomposition(hf);
        double worst_rel = 0;
        bool above_paper = true;
        for (double theta : {0.25, 0.5, 1.0, 1.5, 1.75}) {
            MourreFormResult res = mourre_form_min(fdec, hf, EnergyInterval::j_theta(theta, 1));
            const double symbol = 8.0 * theta * (1.0 - theta / 4.0);
            worst_rel = std::max(worst_rel, std::abs(res.min_rayleigh - symbol) / symbol);
            if (res.min_rayleigh <= 2.0 * theta) above_paper = false;
        }
        out.push_back(check(suite, "free d=1 Mourre minimum tracks 8 theta (1 - theta/4)", worst_rel, 0.05,
                            worst_rel <= 0.05 && above_paper,
                            above_paper ? "strictly above 2 theta" : "NOT above 2 theta"));
    }
    { // weighted boundedness of projected states over box sizes
        // Evaluate phi(H) for a window function through the dense eigenbasis.
        auto filtered_apply = [](const SpectralDecomposition& dl, const LatticeState& s, auto&& window_fn) {
            Eigen::VectorXcd x(dl.eigenvectors.rows());
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = s[i];
            Eigen::VectorXd cr = dl.eigenvectors.transpose() * x.real().matrix();
            Eigen::VectorXd ci = dl.eigenvectors.transpose() * x.imag().matrix();
            for (Eigen::Index k = 0; k < cr.size(); ++k) {
                const double f = window_fn(dl.eigenvalues[k]);
                cr[k] *= f;
                ci[k] *= f;
            }
            Eigen::VectorXd yr = dl.eigenvectors * cr, yi = dl.eigenvectors * ci;
            LatticeState outst = LatticeState::zero(s.geometry_ptr());
            for (Eigen::Index i = 0; i < x.size(); ++i) outst[i] = cplx(yr[i], yi[i]);
            return outst;
        };
        auto commutator_norm = [&](const SpectralDecomposition& dl, GeometryPtr gl, auto&& window_fn) {
            auto comm = [&](const LatticeState& s) {
                LatticeState qc = apply_weight_q(filtered_apply(dl, s, window_fn));
                LatticeState cq = filtered_apply(dl, apply_weight_q(s), window_fn);
                auto a = qc.amplitudes();
                const auto b = cq.amplitudes();
                for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
                return qc;
            };
            ApplyFn fwd = comm;
            ApplyFn bwd = [&](const LatticeState& s) {
                LatticeState r = comm(s);
                r.scale(-1.0); // [Q, phi(H)] is antisymmetric
                return r;
            };
            return estimate_operator_norm(fwd, bwd, std::move(gl), 555, 600).value;
        };
        auto sharp = [](double e) { return std::abs(e) <= 1.0 ? 1.0 : 0.0; };
        auto smooth = [](double e) { // C^1 ramps of width 0.5 around [-1,1]
            auto ramp = [](double x) { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : 0.5 - 0.5 * std::cos(M_PI * x); };
            return ramp((e + 1.0) / 0.5 + 0.5) * ramp((1.0 - e) / 0.5 + 0.5);
        };
        std::vector<double> smooth_vals, sharp_vals;
        double triangle_defect = -1e300;
        const EnergyInterval w = EnergyInterval::j_theta(1.0, 1);
        for (int L : {50, 100, 200}) {
            auto gl = make_geometry(1, L);
            Hamiltonian hl(realize(PowerLawPotential{1.0, 2.0}, gl));
            SpectralDecomposition dl = dense_eigendecomposition(hl);
            smooth_vals.push_back(commutator_norm(dl, gl, smooth));
            sharp_vals.push_back(commutator_norm(dl, gl, sharp));
            // The wellposedness inequality itself, with the measured norm:
            // ||Q chi u|| <= ||chi Q u|| + ||[Q,chi]|| ||u||.
            for (std::uint64_t s = 0; s < 5; ++s) {
                LatticeState u = LatticeState::random_normalized(gl, 4242 + s);
                const double lhs = apply_weight_q(spectral_projection_apply(dl, w, u)).norm();
                const double rhs = spectral_projection_apply(dl, w, apply_weight_q(u)).norm() +
                                   sharp_vals.back() * (1.0 + 1e-3) + 1e-9;
                triangle_defect = std::max(triangle_defect, lhs - rhs);
            }
        }
        const double spread = *std::max_element(smooth_vals.begin(), smooth_vals.end()) /
                              *std::min_element(smooth_vals.begin(), smooth_vals.end());
        std::string detail = "smooth: ";
        for (double e : smooth_vals) detail += format_double(e) + "  ";
        out.push_back(check(suite, "||[Q, phi(H)]|| uniform over L in {50,100,200}, smooth window", spread, 1.5,
                            spread <= 1.5, detail));
        std::string sharp_detail = "sharp-cutoff estimates grow ~0.21 L: ";
        for (double e : sharp_vals) sharp_detail += format_double(e) + "  ";
        out.push_back(info(suite, "||[Q, chi_I]|| with a sharp window (reported)", sharp_vals.back(), sharp_detail));
        out.push_back(check(suite, "||Q chi_I u || <= ||chi_I Q u|| + ||[Q,chi_I]|| ||u||", triangle_defect, 0,
                            triangle_defect <= 0));
    }
}

// ---------------------------------------------------------------- transport

void verify_transport(std::vector<CheckResult>& out) {
    const std::string suite = "transport";
    { // order-1 envelope and inequality suites on three control runs
        double worst_env = -1e300;
        int violations = 0;
        double worst_jensen = 0, worst_interp = 0;
        for (const auto& spec :
             std::vector<PotentialSpec>{ZeroPotential{}, PowerLawPotential{1.0, 2.0}, AndersonPotential{8.0, 7}}) {
            auto g = make_geometry(1, 512);
            Hamiltonian h(realize(spec, g));
            int origin[] = {0};
            LatticeState u = LatticeState::delta(g, origin);
            ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
            const double horizon = light_cone_horizon(*g, 0, 0.9);
            std::vector<double> times;
            for (int i = 0; i <= 40; ++i) times.push_back(horizon * (i + 1) / 41.0);
            MomentSeries series =
                record_moments(h, prop, u, std::vector<double>{0.5, 1.0, 1.5, 2.0}, times, std::vector<int>{10, 25},
                               horizon);
            UpperBoundReport rep = check_upper_bounds(series, h, u);
            worst_env = std::max(worst_env, rep.order1_worst_margin);
            if (rep.order1_violation) ++violations;
            MomentInequalityReport ineq = check_moment_inequalities(series);
            violations += ineq.jensen_violations + ineq.interp_violations;
            worst_jensen = std::min(worst_jensen, ineq.jensen_worst_slack);
            worst_interp = std::min(worst_interp, ineq.interp_worst_slack);
        }
        out.push_back(check(suite, "order-1 envelope never violated (hard assertion)", worst_env, 0, violations == 0,
                            "worst margin " + format_double(worst_env)));
        out.push_back(check(suite, "per-sample Jensen + interpolation inequalities", std::min(worst_jensen, worst_interp),
                            -1e-12, violations == 0));
    }
    { // ratio band and slope chain on a free run
        auto g = make_geometry(1, 1024);
        Hamiltonian h = free_hamiltonian(g);
        int origin[] = {0};
        LatticeState u = LatticeState::delta(g, origin);
        ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
        const double horizon = light_cone_horizon(*g, 0, 0.9);
        std::vector<double> times;
        for (int i = 0; i < 60; ++i) times.push_back(1.0 * std::pow(horizon / 1.0, i / 59.0));
        MomentSeries series = record_moments(h, prop, u, std::vector<double>{0.5, 1.0, 2.0}, times,
                                             std::vector<int>{10, 25}, horizon);
        ExponentFit f1 = fit_transport_exponent(series, 1.0, 10.0, 0.8 * horizon);
        const double band = f1.ratio_max / f1.ratio_min;
        out.push_back(check(suite, "free-run ratio band max/min (r=1)", band, 4.0, band <= 4.0));
        ExponentFit fh = fit_transport_exponent(series, 0.5, 10.0, 0.8 * horizon);
        ExponentFit f2 = fit_transport_exponent(series, 2.0, 10.0, 0.8 * horizon);
        // Jensen slope chain on raw log-log slopes.
        bool chain = true;
        if (fh.residual_rms <= 0.01 && f1.residual_rms <= 0.01)
            chain = chain && (1.0 * f1.slope >= (1.0 / 0.5) * (0.5 * fh.slope) - 0.02);
        if (f1.residual_rms <= 0.01 && f2.residual_rms <= 0.01)
            chain = chain && (2.0 * f2.slope >= (2.0 / 1.0) * (1.0 * f1.slope) - 0.02);
        out.push_back(check(suite, "Jensen slope chain across r in {0.5,1,2}", chain ? 0 : 1, 0, chain,
                            "slopes " + format_double(fh.slope) + ", " + format_double(f1.slope) + ", " +
                                format_double(f2.slope)));
        auto rage = rage_diagnostics(series);
        out.push_back(info(suite, "free-run time-averaged in-ball(N=25) probability", rage[1].time_avg_final,
                           "label " + rage[1].label));
    }
    { // localization control
        auto g = make_geometry(1, 256);
        Hamiltonian h(realize(AndersonPotential{8.0, 7}, g));
        SpectralDecomposition dec = dense_eigendecomposition(h);
        int origin[] = {0};
        LatticeState u = LatticeState::delta(g, origin);
        std::vector<double> times;
        for (int i = 0; i <= 30; ++i) times.push_back(std::pow(10.0, -0.5 + 2.5 * i / 30.0));
        MomentSeries series;
        series.orders = {1.0};
        series.ball_radii = {10, 25};
        series.horizon = 1e9;
        for (double t : times) {
            LatticeState psi = dense_oracle_propagate(dec, u, t);
            series.times.push_back(t);
            series.norm0.push_back(psi.norm());
            series.norms.push_back({weighted_norm(psi, 1.0)});
            series.ball.push_back({ball_probability(psi, 10), ball_probability(psi, 25)});
        }
        auto rage = rage_diagnostics(series);
        out.push_back(check(suite, "anderson control: sup in-ball(N=25) probability", rage[1].sup_ball, 0.9,
                            rage[1].sup_ball >= 0.9, "label " + rage[1].label));
    }
}

} // namespace

std::vector<CheckResult> run_verify_suite(const std::string& suite) {
    std::vector<CheckResult> out;
    if (suite == "operators" || suite == "all") verify_operators(out);
    if (suite == "propagation" || suite == "all") verify_propagation(out);
    if (suite == "spectral" || suite == "all") verify_spectral(out);
    if (suite == "transport" || suite == "all") verify_transport(out);
    if (out.empty()) throw std::invalid_argument("unknown verify suite '" + suite +
                                                 "' (use operators|propagation|spectral|transport|all)");
    return out;
}

std::string format_check_line(const CheckResult& r) {
    std::ostringstream os;
    if (r.informational)
        os << "[INFO] ";
    else
        os << (r.pass ? "[PASS] " : "[FAIL] ");
    os << r.suite << ": " << r.name << "  measured=" << format_double(r.measured);
    if (!r.informational) os << " threshold=" << format_double(r.threshold);
    if (!r.detail.empty()) os << "  (" << r.detail << ")";
    return os.str();
}

} // namespace ballistic
