#include "ballistic/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "ballistic/util.hpp"

namespace ballistic {

namespace {

// Sweep one axis, adding coeff_plus(n)*in[n+e_j] + coeff_minus(n)*in[n-e_j]
// into out. The lattice decomposes into lines along the axis; hops that leave
// the box are dropped (Dirichlet).
template <typename FPlus, typename FMinus>
void axis_hop_sweep(const BoxGeometry& g, int axis, std::span<const cplx> in, std::span<cplx> out, FPlus cplus,
                    FMinus cminus) {
    const std::int64_t s = g.stride(axis);
    const std::int64_t m = g.extent();
    const std::int64_t n = g.total_sites();
    const std::int64_t block = s * m;
    for (std::int64_t hi = 0; hi < n; hi += block) {
        for (std::int64_t lo = 0; lo < s; ++lo) {
            const std::int64_t base = hi + lo;
            for (std::int64_t k = 0; k < m; ++k) {
                const std::int64_t i = base + k * s;
                cplx acc = 0;
                if (k + 1 < m) acc += cplus(i, k) * in[static_cast<std::size_t>(i + s)];
                if (k > 0) acc += cminus(i, k) * in[static_cast<std::size_t>(i - s)];
                out[static_cast<std::size_t>(i)] += acc;
            }
        }
    }
}

void check_same_geometry(const BoxGeometry& a, const BoxGeometry& b) {
    if (!(a == b)) throw std::invalid_argument("geometry mismatch between operator and state");
}

} // namespace

Hamiltonian::Hamiltonian(PotentialField potential) : potential_(std::move(potential)) {}

Hamiltonian free_hamiltonian(GeometryPtr geometry) {
    return Hamiltonian(realize(ZeroPotential{}, std::move(geometry)));
}

void Hamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
    apply_scaled(in, out, 0.0, 1.0);
}

void Hamiltonian::apply_scaled(std::span<const cplx> in, std::span<cplx> out, double center,
                               double half_width) const {
    const BoxGeometry& g = geometry();
    const std::int64_t n = g.total_sites();
    if (static_cast<std::int64_t>(in.size()) != n || static_cast<std::int64_t>(out.size()) != n)
        throw std::invalid_argument("buffer length mismatch in Hamiltonian apply");
    const double inv = 1.0 / half_width;
    const auto v = potential_.values();

    if (g.dimension() == 1) {
        // 1-d fast path: single contiguous line.
        const double* vr = v.data();
        const cplx* x = in.data();
        cplx* y = out.data();
        const std::int64_t lim = n - 1;
        y[0] = ((vr[0] - center) * x[0] - x[1]) * inv;
        for (std::int64_t i = 1; i < lim; ++i) y[i] = ((vr[i] - center) * x[i] - x[i - 1] - x[i + 1]) * inv;
        y[lim] = ((vr[lim] - center) * x[lim] - x[lim - 1]) * inv;
        return;
    }

    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = (v[static_cast<std::size_t>(i)] - center) * in[static_cast<std::size_t>(i)];
    // -Delta: each in-box neighbor contributes -1.
    for (int j = 0; j < g.dimension(); ++j)
        axis_hop_sweep(
            g, j, in, out, [](std::int64_t, std::int64_t) { return -1.0; },
            [](std::int64_t, std::int64_t) { return -1.0; });
    if (half_width != 1.0)
        for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] *= inv;
}

LatticeState apply_laplacian(const LatticeState& state) {
    const BoxGeometry& g = state.geometry();
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    for (int j = 0; j < g.dimension(); ++j)
        axis_hop_sweep(
            g, j, state.amplitudes(), out.amplitudes(), [](std::int64_t, std::int64_t) { return 1.0; },
            [](std::int64_t, std::int64_t) { return 1.0; });
    return out;
}

LatticeState apply_axis_laplacian(const LatticeState& state, int axis) {
    const BoxGeometry& g = state.geometry();
    if (axis < 0 || axis >= g.dimension()) throw std::invalid_argument("axis out of range");
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    axis_hop_sweep(
        g, axis, state.amplitudes(), out.amplitudes(), [](std::int64_t, std::int64_t) { return 1.0; },
        [](std::int64_t, std::int64_t) { return 1.0; });
    return out;
}

LatticeState apply_hamiltonian(const Hamiltonian& h, const LatticeState& state) {
    check_same_geometry(h.geometry(), state.geometry());
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    h.apply(state.amplitudes(), out.amplitudes());
    return out;
}

LatticeState apply_weight_q(const LatticeState& state) {
    const auto n2 = state.geometry().norm2_table();
    LatticeState out = state;
    auto amp = out.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) amp[i] *= std::sqrt(1.0 + n2[i]);
    return out;
}

LatticeState apply_q_squared(const LatticeState& state) {
    const auto n2 = state.geometry().norm2_table();
    LatticeState out = state;
    auto amp = out.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) amp[i] *= 1.0 + n2[i];
    return out;
}

LatticeState apply_commutator_q_h(const Hamiltonian& h, const LatticeState& state) {
    check_same_geometry(h.geometry(), state.geometry());
    const BoxGeometry& g = state.geometry();
    const auto n2 = g.norm2_table();
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    // [Q,H] = [Q,-Delta]: the hop from n±e_j carries
    // sqrt(1+|n±e_j|^2) - sqrt(1+|n|^2). Each such coefficient is bounded by
    // sqrt(5) in magnitude.
    for (int j = 0; j < g.dimension(); ++j) {
        const std::int64_t s = g.stride(j);
        axis_hop_sweep(
            g, j, state.amplitudes(), out.amplitudes(),
            [&](std::int64_t i, std::int64_t) {
                return std::sqrt(1.0 + n2[static_cast<std::size_t>(i + s)]) -
                       std::sqrt(1.0 + n2[static_cast<std::size_t>(i)]);
            },
            [&](std::int64_t i, std::int64_t) {
                return std::sqrt(1.0 + n2[static_cast<std::size_t>(i - s)]) -
                       std::sqrt(1.0 + n2[static_cast<std::size_t>(i)]);
            });
    }
    return out;
}

LatticeState apply_dilation(const Hamiltonian& h, const LatticeState& state) {
    check_same_geometry(h.geometry(), state.geometry());
    const BoxGeometry& g = state.geometry();
    const int L = g.radius();
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    for (int j = 0; j < g.dimension(); ++j) {
        axis_hop_sweep(
            g, j, state.amplitudes(), out.amplitudes(),
            [&](std::int64_t, std::int64_t k) { return 2.0 * (double(k) - L) + 1.0; },
            [&](std::int64_t, std::int64_t k) { return -(2.0 * (double(k) - L) - 1.0); });
    }
    return out;
}

LatticeState apply_double_commutator(const Hamiltonian& h, const LatticeState& state) {
    LatticeState hc = apply_hamiltonian(h, apply_dilation(h, state));
    LatticeState ch = apply_dilation(h, apply_hamiltonian(h, state));
    auto a = hc.amplitudes();
    const auto b = ch.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return hc;
}

LatticeState apply_potential_correction(const Hamiltonian& h, const LatticeState& state) {
    check_same_geometry(h.geometry(), state.geometry());
    const BoxGeometry& g = state.geometry();
    const int L = g.radius();
    const auto v = h.potential().values();
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    for (int j = 0; j < g.dimension(); ++j) {
        const std::int64_t s = g.stride(j);
        axis_hop_sweep(
            g, j, state.amplitudes(), out.amplitudes(),
            [&](std::int64_t i, std::int64_t k) {
                return (2.0 * (double(k) - L) + 1.0) *
                       (v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i + s)]);
            },
            [&](std::int64_t i, std::int64_t k) {
                return -(2.0 * (double(k) - L) - 1.0) *
                       (v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i - s)]);
            });
    }
    return out;
}

LatticeState apply_double_commutator_bulk(const Hamiltonian& h, const LatticeState& state) {
    const BoxGeometry& g = state.geometry();
    check_same_geometry(h.geometry(), g);
    LatticeState out = apply_potential_correction(h, state);
    auto acc = out.amplitudes();
    const auto in = state.amplitudes();
    for (int j = 0; j < g.dimension(); ++j) {
        LatticeState dj2 = apply_axis_laplacian(apply_axis_laplacian(state, j), j);
        const auto d = dj2.amplitudes();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += 2.0 * (4.0 * in[i] - d[i]);
    }
    return out;
}

LatticeState apply_commutator_h_qm(const Hamiltonian& h, const LatticeState& state, int m) {
    if (m < 1) throw std::invalid_argument("commutator order m must be >= 1");
    check_same_geometry(h.geometry(), state.geometry());
    const BoxGeometry& g = state.geometry();
    const auto n2 = g.norm2_table();
    const double half_m = 0.5 * m;
    // [H,Q^m] = [Q^m,Delta]: coefficient (1+|n|^2)^{m/2} - (1+|n±e_j|^2)^{m/2}
    // on the hop from n±e_j.
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    for (int j = 0; j < g.dimension(); ++j) {
        const std::int64_t s = g.stride(j);
        axis_hop_sweep(
            g, j, state.amplitudes(), out.amplitudes(),
            [&](std::int64_t i, std::int64_t) {
                return std::pow(1.0 + n2[static_cast<std::size_t>(i)], half_m) -
                       std::pow(1.0 + n2[static_cast<std::size_t>(i + s)], half_m);
            },
            [&](std::int64_t i, std::int64_t) {
                return std::pow(1.0 + n2[static_cast<std::size_t>(i)], half_m) -
                       std::pow(1.0 + n2[static_cast<std::size_t>(i - s)], half_m);
            });
    }
    return out;
}

DenseOperator materialize_dense(const ApplyFn& op, GeometryPtr geometry, std::string provenance,
                                std::int64_t dense_cap) {
    const std::int64_t n = geometry->total_sites();
    if (n > dense_cap) throw std::invalid_argument("dense materialization cap exceeded: " + std::to_string(n) + " > " +
                                                   std::to_string(dense_cap));
    DenseOperator d;
    d.provenance = std::move(provenance);
    d.mat.resize(n, n);
    LatticeState basis = LatticeState::zero(geometry);
    for (std::int64_t c = 0; c < n; ++c) {
        basis[c] = 1.0;
        LatticeState col = op(basis);
        basis[c] = 0.0;
        for (std::int64_t r = 0; r < n; ++r) d.mat(r, c) = col[r].real();
    }
    return d;
}

NormEstimate estimate_operator_norm(const ApplyFn& apply, const ApplyFn& apply_transpose, GeometryPtr geometry,
                                    std::uint64_t seed, int max_iterations, double tol) {
    LatticeState v = LatticeState::random_normalized(geometry, seed);
    NormEstimate est;
    double prev = 0;
    for (int it = 1; it <= max_iterations; ++it) {
        LatticeState av = apply(v);
        const double norm_av = av.norm();
        est.value = norm_av; // Rayleigh-quotient estimate: ||A v|| with ||v|| = 1
        est.iterations = it;
        est.rel_change = std::abs(norm_av - prev) / std::max(norm_av, 1e-300);
        if (it > 8 && est.rel_change < tol) break;
        prev = norm_av;
        LatticeState w = apply_transpose(av); // one power step on A^T A
        const double nw = w.norm();
        if (nw == 0) break; // A annihilates the iterate; estimate stays 0
        w.scale(1.0 / nw);
        v = std::move(w);
    }
    return est;
}

NormEstimate commutator_q_h_norm(const Hamiltonian& h, int max_iterations) {
    ApplyFn fwd = [&h](const LatticeState& s) { return apply_commutator_q_h(h, s); };
    ApplyFn bwd = [&h](const LatticeState& s) {
        LatticeState r = apply_commutator_q_h(h, s);
        r.scale(-1.0); // [Q,H] is antisymmetric
        return r;
    };
    return estimate_operator_norm(fwd, bwd, h.geometry_ptr(), 777, max_iterations);
}

NormEstimate hqm_ratio_norm(const Hamiltonian& h, int m, int max_iterations) {
    const auto& w = weight_table(h.geometry(), 0.5 * (m - 1)); // (1+|n|^2)^{(m-1)/2} = Q^{m-1} diagonal
    auto scale_inv = [&w](const LatticeState& s) {
        LatticeState r = s;
        auto amp = r.amplitudes();
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] /= w[i];
        return r;
    };
    ApplyFn fwd = [&, m](const LatticeState& s) { return apply_commutator_h_qm(h, scale_inv(s), m); };
    // ([H,Q^m] D)^T = D [Q^m,H]^T... [H,Q^m] is antisymmetric, D diagonal:
    // transpose = -D [H,Q^m].
    ApplyFn bwd = [&, m](const LatticeState& s) {
        LatticeState r = scale_inv(apply_commutator_h_qm(h, s, m));
        r.scale(-1.0);
        return r;
    };
    return estimate_operator_norm(fwd, bwd, h.geometry_ptr(), 778, max_iterations);
}

} // namespace ballistic
