#include <doctest.h>

#include "ballistic/operators.hpp"
#include "oracle_helpers.hpp"

using namespace ballistic;
using namespace ballistic::testing;

namespace {

LatticeState delta_at(GeometryPtr g, std::initializer_list<int> site) {
    std::vector<int> s(site);
    return LatticeState::delta(std::move(g), s);
}

} // namespace

TEST_SUITE("operators") {

TEST_CASE("laplacian stencil examples") {
    auto g1 = make_geometry(1, 4);
    LatticeState r = apply_laplacian(delta_at(g1, {0}));
    CHECK(l2_diff(r, [&] {
              LatticeState e = LatticeState::zero(g1);
              int p[] = {1}, m[] = {-1};
              e[*g1->index_of(p)] = 1.0;
              e[*g1->index_of(m)] = 1.0;
              return e;
          }()) <= 1e-15);

    auto g2 = make_geometry(2, 3);
    LatticeState r2 = apply_laplacian(delta_at(g2, {0, 0}));
    int count = 0;
    for (std::int64_t i = 0; i < g2->total_sites(); ++i)
        if (std::abs(r2[i]) > 0) ++count;
    CHECK(count == 4);

    auto g = make_geometry(1, 2);
    LatticeState ones(g, std::vector<cplx>{1, 1, 1, 1, 1});
    LatticeState lap = apply_laplacian(ones);
    const std::vector<double> expect = {1, 2, 2, 2, 1};
    for (std::int64_t i = 0; i < 5; ++i) CHECK(lap[i].real() == doctest::Approx(expect[static_cast<std::size_t>(i)]));
}

TEST_CASE("hamiltonian apply examples") {
    auto g = make_geometry(1, 3);
    Hamiltonian hfree = free_hamiltonian(g);
    LatticeState r = apply_hamiltonian(hfree, delta_at(g, {0}));
    int p[] = {1}, m[] = {-1};
    CHECK(r[*g->index_of(p)].real() == doctest::Approx(-1.0));
    CHECK(r[*g->index_of(m)].real() == doctest::Approx(-1.0));

    std::vector<double> v(static_cast<std::size_t>(g->total_sites()), 0.0);
    int zero[] = {0};
    v[static_cast<std::size_t>(*g->index_of(zero))] = 7.0;
    Hamiltonian h(PotentialField(g, v));
    LatticeState r7 = apply_hamiltonian(h, delta_at(g, {0}));
    CHECK(r7[*g->index_of(zero)].real() == doctest::Approx(7.0));
    CHECK(r7[*g->index_of(p)].real() == doctest::Approx(-1.0));
}

TEST_CASE("hamiltonian agrees with the direct dense reference and is symmetric") {
    for (int d : {1, 2}) {
        auto g = make_geometry(d, d == 1 ? 40 : 6);
        Hamiltonian h(realize(AndersonPotential{3.0, 5}, g));
        Eigen::MatrixXd ref = dense_reference_hamiltonian(h);
        DenseOperator made = materialize_dense([&](const LatticeState& s) { return apply_hamiltonian(h, s); }, g, "H");
        CHECK((ref - made.mat).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((made.mat - made.mat.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
        // <phi, H psi> = <H phi, psi> on random pairs
        for (std::uint64_t s = 0; s < 5; ++s) {
            LatticeState a = LatticeState::random_normalized(g, 10 + s);
            LatticeState b = LatticeState::random_normalized(g, 20 + s);
            const cplx lhs = inner_product(a, apply_hamiltonian(h, b));
            const cplx rhs = inner_product(apply_hamiltonian(h, a), b);
            CHECK(std::abs(lhs - rhs) <= 1e-13);
        }
    }
}

TEST_CASE("geometry mismatch is an error") {
    auto g = make_geometry(1, 4);
    auto g2 = make_geometry(1, 5);
    Hamiltonian h = free_hamiltonian(g);
    CHECK_THROWS_AS(apply_hamiltonian(h, delta_at(g2, {0})), std::invalid_argument);
}

TEST_CASE("weight operator examples") {
    auto g = make_geometry(2, 4);
    LatticeState d0 = delta_at(g, {0, 0});
    CHECK(l2_diff(apply_weight_q(d0), d0) <= 1e-15);
    LatticeState d2 = delta_at(g, {2, 0});
    int site[] = {2, 0};
    CHECK(apply_weight_q(d2)[*g->index_of(site)].real() == doctest::Approx(std::sqrt(5.0)));
    LatticeState psi = LatticeState::random_normalized(g, 3);
    CHECK(apply_weight_q(psi).norm() == doctest::Approx(weighted_norm(psi, 1.0)).epsilon(1e-14));
    CHECK(apply_q_squared(psi).norm() == doctest::Approx(weighted_norm(psi, 2.0)).epsilon(1e-14));
}

TEST_CASE("[Q,H] stencil: coefficient, V-independence, compositional agreement") {
    auto g = make_geometry(1, 6);
    Hamiltonian hfree = free_hamiltonian(g);
    // matrix entry (0,1): output at n=0 reading the hop from n=1
    LatticeState d1 = delta_at(g, {1});
    int zero[] = {0};
    CHECK(apply_commutator_q_h(hfree, d1)[*g->index_of(zero)].real() ==
          doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));

    Hamiltonian hv(realize(AndersonPotential{5.0, 9}, g));
    for (std::uint64_t s = 0; s < 5; ++s) {
        LatticeState psi = LatticeState::random_normalized(g, 40 + s);
        CHECK(l2_diff(apply_commutator_q_h(hfree, psi), apply_commutator_q_h(hv, psi)) <= 1e-14);
        // compositional route QH - HQ
        LatticeState qh = apply_weight_q(apply_hamiltonian(hv, psi));
        LatticeState hq = apply_hamiltonian(hv, apply_weight_q(psi));
        auto a = qh.amplitudes();
        const auto b = hq.amplitudes();
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
        CHECK(l2_diff(qh, apply_commutator_q_h(hv, psi)) <= 1e-13);
    }
}

TEST_CASE("power-iteration norm of [Q,H] stays under 2d sqrt(5)") {
    auto g = make_geometry(1, 500);
    Hamiltonian h = free_hamiltonian(g);
    NormEstimate est = commutator_q_h_norm(h, 1500);
    CHECK(est.value <= 2.0 * std::sqrt(5.0) + 1e-9);
    CHECK(est.value > 1.9); // the d=1 velocity bound is ~2
}

TEST_CASE("dilation stencil [H,-Q^2]") {
    auto g = make_geometry(1, 5);
    Hamiltonian h = free_hamiltonian(g);
    LatticeState r = apply_dilation(h, delta_at(g, {0}));
    // dense-bracket oracle fixes the sign: H(-Q^2) - (-Q^2)H columns
    Eigen::MatrixXd dh = dense_reference_hamiltonian(h);
    Eigen::MatrixXd q2 = Eigen::MatrixXd::Zero(dh.rows(), dh.cols());
    for (Eigen::Index i = 0; i < dh.rows(); ++i) q2(i, i) = 1.0 + g->site_norm2(i);
    Eigen::MatrixXd bracket = dh * (-q2) - (-q2) * dh;
    DenseOperator dil = materialize_dense([&](const LatticeState& s) { return apply_dilation(h, s); }, g, "[H,-Q^2]");
    CHECK((bracket - dil.mat).cwiseAbs().maxCoeff() <= 1e-12);
    int p[] = {1}, m[] = {-1};
    CHECK(r[*g->index_of(p)].real() == doctest::Approx(-1.0));
    CHECK(r[*g->index_of(m)].real() == doctest::Approx(-1.0));

    // diagonal potentials drop out
    Hamiltonian hv(realize(PeriodicPotential{{1.0, -2.0, 0.5}}, g));
    for (std::uint64_t s = 0; s < 4; ++s) {
        LatticeState psi = LatticeState::random_normalized(g, 60 + s);
        CHECK(l2_diff(apply_dilation(h, psi), apply_dilation(hv, psi)) <= 1e-14);
    }

    // d=2: exactly 4 nonzero entries on a delta
    auto g2 = make_geometry(2, 3);
    Hamiltonian h2 = free_hamiltonian(g2);
    LatticeState r2 = apply_dilation(h2, delta_at(g2, {0, 0}));
    int nz = 0;
    for (std::int64_t i = 0; i < g2->total_sites(); ++i)
        if (std::abs(r2[i]) > 0) ++nz;
    CHECK(nz == 4);
}

TEST_CASE("double commutator examples and identities") {
    auto g = make_geometry(1, 30);
    Hamiltonian h = free_hamiltonian(g);
    LatticeState r = apply_double_commutator(h, delta_at(g, {0}));
    int zero[] = {0}, two[] = {2}, mtwo[] = {-2};
    CHECK(r[*g->index_of(zero)].real() == doctest::Approx(4.0));
    CHECK(r[*g->index_of(two)].real() == doctest::Approx(-2.0));
    CHECK(r[*g->index_of(mtwo)].real() == doctest::Approx(-2.0));

    auto g2 = make_geometry(2, 8);
    Hamiltonian h2 = free_hamiltonian(g2);
    LatticeState r2 = apply_double_commutator(h2, delta_at(g2, {0, 0}));
    int origin[] = {0, 0};
    CHECK(r2[*g2->index_of(origin)].real() == doctest::Approx(8.0));
}

TEST_CASE("decaying V: double-commutator correction shrinks with distance") {
    auto g = make_geometry(1, 200);
    Hamiltonian hv(realize(PowerLawPotential{1.0, 2.0}, g));
    Hamiltonian hf = free_hamiltonian(g);
    // column-wise sup of the [V,.] correction at increasing distance
    double prev = 1e300;
    for (int radius : {10, 40, 160}) {
        LatticeState col = delta_at(g, {radius});
        LatticeState diff = apply_double_commutator(hv, col);
        LatticeState base = apply_double_commutator(hf, col);
        double sup = 0;
        for (std::int64_t i = 0; i < g->total_sites(); ++i) sup = std::max(sup, std::abs(diff[i] - base[i]));
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("potential correction stencil matches the dense bracket") {
    auto g = make_geometry(1, 40);
    Hamiltonian h(realize(PowerLawPotential{1.0, 1.0}, g));
    Eigen::MatrixXd dh = dense_reference_hamiltonian(h);
    Eigen::MatrixXd vdiag = Eigen::MatrixXd::Zero(dh.rows(), dh.cols());
    for (Eigen::Index i = 0; i < dh.rows(); ++i) vdiag(i, i) = h.potential()[i];
    DenseOperator dil = materialize_dense([&](const LatticeState& s) { return apply_dilation(h, s); }, g, "C");
    Eigen::MatrixXd bracket = vdiag * dil.mat - dil.mat * vdiag;
    DenseOperator corr =
        materialize_dense([&](const LatticeState& s) { return apply_potential_correction(h, s); }, g, "[V,C]");
    CHECK((bracket - corr.mat).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("materialize_dense examples and cap") {
    auto g = make_geometry(1, 1);
    Hamiltonian h = free_hamiltonian(g);
    DenseOperator lap = materialize_dense([&](const LatticeState& s) { return apply_hamiltonian(h, s); }, g, "-Delta");
    Eigen::Matrix3d expect;
    expect << 0, -1, 0, -1, 0, -1, 0, -1, 0;
    CHECK((lap.mat - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK(lap.provenance == "-Delta");

    std::vector<double> v = {1, 2, 3};
    Hamiltonian hv(PotentialField(g, v));
    DenseOperator dh = materialize_dense([&](const LatticeState& s) { return apply_hamiltonian(hv, s); }, g, "H");
    Eigen::Matrix3d expect2;
    expect2 << 1, -1, 0, -1, 2, -1, 0, -1, 3;
    CHECK((dh.mat - expect2).cwiseAbs().maxCoeff() == 0.0);

    auto big = make_geometry(1, 3000);
    Hamiltonian hb = free_hamiltonian(big);
    CHECK_THROWS_AS(materialize_dense([&](const LatticeState& s) { return apply_hamiltonian(hb, s); }, big, "H"),
                    std::invalid_argument);
}

TEST_CASE("dense([Q,H]) equals the dense product bracket") {
    auto g = make_geometry(1, 25);
    Hamiltonian h(realize(AndersonPotential{2.0, 4}, g));
    DenseOperator dq = materialize_dense([](const LatticeState& s) { return apply_weight_q(s); }, g, "Q");
    Eigen::MatrixXd dh = dense_reference_hamiltonian(h);
    Eigen::MatrixXd product = dq.mat * dh - dh * dq.mat;
    DenseOperator comm =
        materialize_dense([&](const LatticeState& s) { return apply_commutator_q_h(h, s); }, g, "[Q,H]");
    CHECK((product - comm.mat).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((comm.mat + comm.mat.transpose()).cwiseAbs().maxCoeff() <= 1e-13); // antisymmetric
}

TEST_CASE("Jacobi consistency of the nested brackets, with symmetry structure") {
    auto g = make_geometry(1, 100); // 201 sites
    Hamiltonian h(realize(WignerVonNeumannPotential{1.0, 1.0}, g));
    Eigen::MatrixXd dh = dense_reference_hamiltonian(h);
    Eigen::MatrixXd q2 = Eigen::MatrixXd::Zero(dh.rows(), dh.cols());
    for (Eigen::Index i = 0; i < dh.rows(); ++i) q2(i, i) = 1.0 + g->site_norm2(i);
    Eigen::MatrixXd inner = dh * (-q2) - (-q2) * dh;
    Eigen::MatrixXd outer = dh * inner - inner * dh;
    DenseOperator dc =
        materialize_dense([&](const LatticeState& s) { return apply_double_commutator(h, s); }, g, "[H,[H,-Q^2]]");
    const double scale = outer.cwiseAbs().maxCoeff();
    CHECK((outer - dc.mat).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((dc.mat - dc.mat.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

TEST_CASE("bulk double commutator: symmetric, and exact on interior sites") {
    auto g = make_geometry(2, 10);
    Hamiltonian h(realize(PowerLawPotential{0.5, 2.0}, g));
    DenseOperator bulk =
        materialize_dense([&](const LatticeState& s) { return apply_double_commutator_bulk(h, s); }, g, "bulk");
    CHECK((bulk.mat - bulk.mat.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    DenseOperator comp =
        materialize_dense([&](const LatticeState& s) { return apply_double_commutator(h, s); }, g, "comp");
    // agreement on interior columns/rows (distance >= 2 from the edge)
    double worst = 0;
    for (Eigen::Index c = 0; c < bulk.mat.cols(); ++c) {
        auto cs = g->site_of(c);
        if (std::abs(cs[0]) > 8 || std::abs(cs[1]) > 8) continue;
        for (Eigen::Index r = 0; r < bulk.mat.rows(); ++r) {
            auto rs = g->site_of(r);
            if (std::abs(rs[0]) > 8 || std::abs(rs[1]) > 8) continue;
            worst = std::max(worst, std::abs(bulk.mat(r, c) - comp.mat(r, c)));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("[H,Q^m] ratio norms are finite and ordered") {
    auto g = make_geometry(1, 200);
    Hamiltonian h = free_hamiltonian(g);
    double prev = 0;
    for (int m : {1, 2, 3}) {
        NormEstimate est = hqm_ratio_norm(h, m, 800);
        CHECK(est.value > prev);
        CHECK(est.value < 10.0);
        prev = est.value;
    }
}

} // TEST_SUITE
