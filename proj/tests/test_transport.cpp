#include <doctest.h>

#include "ballistic/transport.hpp"
#include "oracle_helpers.hpp"

using namespace ballistic;
using namespace ballistic::testing;

namespace {

MomentSeries synthetic_power_series(double coeff, std::vector<double> orders) {
    MomentSeries s;
    s.orders = std::move(orders);
    s.horizon = 1e9;
    for (int i = 0; i < 24; ++i) {
        const double t = std::pow(10.0, 0.0 + 2.0 * i / 23.0);
        s.times.push_back(t);
        s.norm0.push_back(1.0);
        std::vector<double> row;
        for (double r : s.orders) row.push_back(coeff * std::pow(t, r));
        s.norms.push_back(std::move(row));
        s.ball.push_back({});
    }
    return s;
}

} // namespace

TEST_SUITE("transport") {

TEST_CASE("record_moments: free 1 + 2t^2 law and the t = 0 row") {
    auto g = make_geometry(1, 512);
    Hamiltonian h = free_hamiltonian(g);
    int origin[] = {0};
    LatticeState u = LatticeState::delta(g, origin);
    ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
    const double horizon = light_cone_horizon(*g, 0, 0.9);
    std::vector<double> times = {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0};
    MomentSeries s = record_moments(h, prop, u, std::vector<double>{1.0, 2.0}, times, std::vector<int>{25}, horizon);
    CHECK(s.norms[0][0] == doctest::Approx(weighted_norm(u, 1.0)));
    CHECK(s.norms[0][1] == doctest::Approx(weighted_norm(u, 2.0)));
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(s.norm0[i] == doctest::Approx(1.0).epsilon(1e-11));
        const double expect = std::sqrt(1.0 + 2.0 * times[i] * times[i]);
        CHECK(std::abs(s.norms[i][0] - expect) / expect <= 2e-3);
    }
}

TEST_CASE("record_moments rejects horizon violations and bad orders") {
    auto g = make_geometry(1, 64);
    Hamiltonian h = free_hamiltonian(g);
    int origin[] = {0};
    LatticeState u = LatticeState::delta(g, origin);
    ChebyshevPropagator prop(h, 1.0, 1e-12);
    const double horizon = light_cone_horizon(*g, 0, 0.9);
    CHECK_THROWS_AS(record_moments(h, prop, u, std::vector<double>{1.0}, std::vector<double>{horizon + 1.0},
                                   std::vector<int>{5}, horizon),
                    std::invalid_argument);
    CHECK_THROWS_AS(record_moments(h, prop, u, std::vector<double>{4.0}, std::vector<double>{1.0},
                                   std::vector<int>{5}, horizon),
                    std::invalid_argument);
}

TEST_CASE("fit on an exact power law: slope 1.000, flat ratio band") {
    for (double r : {0.5, 1.0, 2.0}) {
        MomentSeries s = synthetic_power_series(3.0, {r});
        ExponentFit f = fit_transport_exponent(s, r, 1.0, 1e3);
        CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.ratio_min == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(f.ratio_max == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(f.residual_rms <= 1e-12);
        CHECK(f.slope_spread <= 1e-10);
    }
}

TEST_CASE("fit validation errors") {
    MomentSeries s = synthetic_power_series(1.0, {1.0});
    CHECK_THROWS_AS(fit_transport_exponent(s, 1.0, 0.5, 100.0), std::invalid_argument); // t_lo < 1
    CHECK_THROWS_AS(fit_transport_exponent(s, 1.0, 10.0, 10.0), std::invalid_argument); // degenerate
    CHECK_THROWS_AS(fit_transport_exponent(s, 1.0, 95.0, 100.0), std::invalid_argument); // < 8 samples
    CHECK_THROWS_AS(fit_transport_exponent(s, 0.7, 1.0, 100.0), std::invalid_argument);  // unknown order
}

TEST_CASE("free evolution fits ballistic on [10, 200]") {
    auto g = make_geometry(1, 512);
    Hamiltonian h = free_hamiltonian(g);
    int origin[] = {0};
    LatticeState u = LatticeState::delta(g, origin);
    ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
    const double horizon = light_cone_horizon(*g, 0, 0.9);
    std::vector<double> times;
    for (int i = 0; i < 40; ++i) times.push_back(std::pow(10.0, 0.0 + std::log10(horizon) * i / 39.0));
    MomentSeries s = record_moments(h, prop, u, std::vector<double>{1.0}, times, std::vector<int>{25}, horizon);
    ExponentFit f = fit_transport_exponent(s, 1.0, 10.0, 200.0);
    CHECK(f.slope == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f.n_samples >= 8);
}

TEST_CASE("upper bounds: free run has strict slack, t = 0 is tight") {
    auto g = make_geometry(1, 400);
    Hamiltonian h = free_hamiltonian(g);
    int origin[] = {0};
    LatticeState u = LatticeState::delta(g, origin);
    ChebyshevPropagator prop(h, ChebyshevPropagator::default_tau(estimate_spectral_bounds(h)), 1e-14);
    const double horizon = light_cone_horizon(*g, 0, 0.9);
    std::vector<double> times = {0.0, 1.0, 5.0, 10.0, 30.0, 60.0, 120.0, horizon};
    MomentSeries s =
        record_moments(h, prop, u, std::vector<double>{1.0, 2.0}, times, std::vector<int>{25}, horizon);
    UpperBoundReport rep = check_upper_bounds(s, h, u);
    CHECK(!rep.order1_violation);
    CHECK(rep.order1_worst_margin <= 0); // tight at t = 0, slack beyond
    // free law sqrt(1+2t^2) <= 1 + c1 t with c1 ~ 2: slack at every t
    CHECK(rep.c1_hat > 1.9);
    CHECK(rep.c1_hat <= 2.0 * std::sqrt(5.0));
    // measured minimal c2 approaches sqrt(6) ~ 2.449 (exact free moments
    // <n^2> = 2t^2, <n^4> = 6t^4 + 2t^2)
    CHECK(rep.c2_min == doctest::Approx(std::sqrt(6.0)).epsilon(0.02));
    CHECK(rep.c2_reference == doctest::Approx(0.5 * rep.c1_hat));
}

TEST_CASE("heisenberg expansion: exact identity at finite volume") {
    auto g = make_geometry(1, 100);
    Hamiltonian h = free_hamiltonian(g);
    SpectralDecomposition dec = dense_eigendecomposition(h);
    int center[] = {0};
    double k[] = {M_PI / 2};
    LatticeState u = LatticeState::gaussian(g, center, 6.0, k);
    const EnergyInterval w = EnergyInterval::j_theta(1.0, 1);
    std::vector<double> tgrid = {0.0, 1.0, 2.5, 5.0, 10.0};
    HeisenbergCheck res = heisenberg_expansion_check(dec, h, w, u, tgrid);
    CHECK(res.max_defect <= 1e-6);
    CHECK(res.max_im <= 1e-9);
    CHECK(res.quadrature_converged);
    // the double-integral term dominates (theta_eff/2) ||chi u||^2 t^2
    CHECK(res.integral_margin >= 0.0);
    CHECK(res.theta_eff == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("heisenberg expansion at t = 0 alone") {
    auto g = make_geometry(1, 60);
    Hamiltonian h(realize(PowerLawPotential{1.0, 2.0}, g));
    SpectralDecomposition dec = dense_eigendecomposition(h);
    int center[] = {0};
    LatticeState u = LatticeState::gaussian(g, center, 4.0);
    std::vector<double> tgrid = {0.0};
    HeisenbergCheck res = heisenberg_expansion_check(dec, h, EnergyInterval(-1.5, 1.5), u, tgrid);
    CHECK(res.max_defect <= 1e-12);
}

TEST_CASE("cross terms: consistency at t = 0 and the almost-orthogonality window") {
    auto g = make_geometry(1, 256);
    Hamiltonian h = free_hamiltonian(g);
    SpectralDecomposition dec = dense_eigendecomposition(h);
    int center[] = {0};
    LatticeState u = LatticeState::gaussian(g, center, 3.0); // symmetric profile at the origin
    EnergyInterval wi(-1.5, -0.5), wj(0.5, 1.5);
    std::vector<double> tgrid = {0.0, 50.0, 100.0, 200.0, 300.0, 400.0};
    CrossTermSeries cross = cross_term_series(dec, wi, wj, u, tgrid);
    CHECK(cross.c0_consistency <= 1e-12);
    CHECK(cross.almost_orthog_fraction == doctest::Approx(1.0));
    // the nu(R)-style bound on |C| at every grid point
    for (double c : cross.c_abs) CHECK(c <= cross.norm1_bound * (1 + 1e-10));
    CHECK_THROWS_AS(cross_term_series(dec, EnergyInterval(-1.0, 0.6), wj, u, tgrid), std::invalid_argument);
}

TEST_CASE("rage diagnostics labels the control dynamics") {
    auto g = make_geometry(1, 256);
    SpectralDecomposition freed = dense_eigendecomposition(free_hamiltonian(g));
    Hamiltonian ha(realize(AndersonPotential{8.0, 7}, g));
    SpectralDecomposition adec = dense_eigendecomposition(ha);
    int origin[] = {0};
    LatticeState u = LatticeState::delta(g, origin);

    auto build = [&](const SpectralDecomposition& dec) {
        MomentSeries s;
        s.orders = {1.0};
        s.ball_radii = {10, 25};
        s.horizon = 1e9;
        for (int i = 0; i <= 40; ++i) {
            const double t = 100.0 * i / 40.0;
            LatticeState psi = dense_oracle_propagate(dec, u, t);
            s.times.push_back(t);
            s.norm0.push_back(psi.norm());
            s.norms.push_back({weighted_norm(psi, 1.0)});
            s.ball.push_back({ball_probability(psi, 10), ball_probability(psi, 25)});
        }
        return s;
    };
    auto anderson = rage_diagnostics(build(adec));
    CHECK(anderson[1].sup_ball >= 0.9);
    CHECK(anderson[1].label == "pp-like");
    auto freerun = rage_diagnostics(build(freed));
    CHECK(freerun[1].tail_pointwise <= 0.2);
    CHECK(freerun[1].time_avg_final < freerun[1].time_avg_half); // averaged probability decays in T
    // delta_0 at t = 0 fills the N = 0 ball
    CHECK(ball_probability(u, 0) == doctest::Approx(1.0));

    MomentSeries one_radius = build(freed);
    one_radius.ball_radii = {10};
    for (auto& row : one_radius.ball) row.resize(1);
    CHECK_THROWS_AS(rage_diagnostics(one_radius), std::invalid_argument);
}

TEST_CASE("moment inequalities hold per-sample on 1000 random states") {
    auto g = make_geometry(1, 48);
    MomentSeries s;
    s.orders = {0.5, 1.0, 1.5, 2.0};
    s.horizon = 1e9;
    for (int i = 0; i < 1000; ++i) {
        LatticeState psi = LatticeState::random_normalized(g, 5000 + static_cast<std::uint64_t>(i));
        s.times.push_back(i + 1.0);
        s.norm0.push_back(psi.norm());
        std::vector<double> row;
        for (double r : s.orders) row.push_back(weighted_norm(psi, r));
        s.norms.push_back(std::move(row));
        s.ball.push_back({});
    }
    MomentInequalityReport rep = check_moment_inequalities(s);
    CHECK(rep.jensen_checks >= 6000);
    CHECK(rep.jensen_violations == 0);
    CHECK(rep.interp_checks >= 2000);
    CHECK(rep.interp_violations == 0);
}

TEST_CASE("anderson run: bounded first moment, flat slope") {
    auto g = make_geometry(1, 256);
    Hamiltonian h(realize(AndersonPotential{8.0, 7}, g));
    SpectralDecomposition dec = dense_eigendecomposition(h);
    int origin[] = {0};
    LatticeState u = LatticeState::delta(g, origin);
    MomentSeries s;
    s.orders = {1.0};
    s.ball_radii = {25};
    s.horizon = 1e9;
    for (int i = 0; i < 30; ++i) {
        const double t = std::pow(10.0, 2.4 * i / 29.0);
        LatticeState psi = dense_oracle_propagate(dec, u, t);
        s.times.push_back(t);
        s.norm0.push_back(psi.norm());
        s.norms.push_back({weighted_norm(psi, 1.0)});
        s.ball.push_back({ball_probability(psi, 25)});
    }
    ExponentFit f = fit_transport_exponent(s, 1.0, 10.0, 200.0);
    CHECK(std::abs(f.slope) <= 0.1);
    for (const auto& row : s.norms) CHECK(row[0] <= 20.0);
}

} // TEST_SUITE
