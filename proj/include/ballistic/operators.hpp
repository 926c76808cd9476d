#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "ballistic/potentials.hpp"

namespace ballistic {

/// H = -Delta + V on the Dirichlet-truncated box (out-of-box amplitudes read
/// as zero). Immutable; apply operations allocate fresh output states.
class Hamiltonian {
public:
    explicit Hamiltonian(PotentialField potential);

    const BoxGeometry& geometry() const { return potential_.geometry(); }
    const GeometryPtr& geometry_ptr() const { return potential_.geometry_ptr(); }
    const PotentialField& potential() const { return potential_; }

    /// out = H in. Buffers must have total_sites length; out is overwritten.
    void apply(std::span<const cplx> in, std::span<cplx> out) const;
    /// out = (H - center) in / half_width, the rescaled operator for the
    /// Chebyshev recurrence (fused so the hot loop touches memory once).
    void apply_scaled(std::span<const cplx> in, std::span<cplx> out, double center, double half_width) const;

private:
    PotentialField potential_;
};

Hamiltonian free_hamiltonian(GeometryPtr geometry);

/// (Delta psi)_n = sum_j (psi_{n+e_j} + psi_{n-e_j}), Dirichlet.
LatticeState apply_laplacian(const LatticeState& state);
/// Single-axis Laplacian Delta_j.
LatticeState apply_axis_laplacian(const LatticeState& state, int axis);
LatticeState apply_hamiltonian(const Hamiltonian& h, const LatticeState& state);

/// (Q psi)_n = sqrt(1+|n|^2) psi_n  and its square.
LatticeState apply_weight_q(const LatticeState& state);
LatticeState apply_q_squared(const LatticeState& state);

/// [Q,H] psi by the explicit hopping-difference stencil with coefficients
/// sqrt(1+|n+-e_j|^2) - sqrt(1+|n|^2). Diagonal V commutes with Q and drops.
LatticeState apply_commutator_q_h(const Hamiltonian& h, const LatticeState& state);

/// [H,-Q^2] psi via the integer-coefficient stencil
/// sum_j ( (2 n_j + 1) psi_{n+e_j} - (2 n_j - 1) psi_{n-e_j} ).
/// Primary path; avoids the ~L^2 cancellation of the compositional route.
LatticeState apply_dilation(const Hamiltonian& h, const LatticeState& state);

/// [H,[H,-Q^2]] psi computed compositionally from the dilation stencil:
/// H([H,-Q^2] psi) - [H,-Q^2](H psi). Exact for the truncated operator;
/// matches the closed form 2 sum_j (4I - Delta_j^2) on interior sites when
/// V = 0.
LatticeState apply_double_commutator(const Hamiltonian& h, const LatticeState& state);

/// The translation-invariant double commutator truncated to the box:
/// 2 sum_j (4I - Delta_j^2) + [V,[H,-Q^2]], with Delta_j the Dirichlet axis
/// Laplacian applied twice. This is the operator whose windowed quadratic
/// form carries the Mourre positivity; the compositional box bracket above
/// has identically zero diagonal in the box eigenbasis and cannot.
LatticeState apply_double_commutator_bulk(const Hamiltonian& h, const LatticeState& state);

/// [V,[H,-Q^2]] psi, the compact correction stencil
/// sum_j ( (2n_j+1)(V_n - V_{n+e_j}) psi_{n+e_j} - (2n_j-1)(V_n - V_{n-e_j}) psi_{n-e_j} ).
LatticeState apply_potential_correction(const Hamiltonian& h, const LatticeState& state);

/// [H,Q^m] psi for integer m >= 1 (general-order hopping-difference stencil).
LatticeState apply_commutator_h_qm(const Hamiltonian& h, const LatticeState& state, int m);

/// n x n real matrix materialized column-by-column from an operator apply,
/// with a provenance tag naming the expression.
struct DenseOperator {
    Eigen::MatrixXd mat;
    std::string provenance;
};

using ApplyFn = std::function<LatticeState(const LatticeState&)>;

inline constexpr std::int64_t kDefaultDenseCap = 4096;

/// Column-by-column materialization on basis states. Throws when the box
/// exceeds the dense cap.
DenseOperator materialize_dense(const ApplyFn& op, GeometryPtr geometry, std::string provenance,
                                std::int64_t dense_cap = kDefaultDenseCap);

struct NormEstimate {
    double value = 0;      // estimate of the operator norm (converges from below)
    int iterations = 0;
    double rel_change = 0; // relative change of the estimate at the last iteration
};

/// Power iteration on A^T A for the spectral norm of A. apply_transpose may
/// equal apply (symmetric) or negate it (antisymmetric).
NormEstimate estimate_operator_norm(const ApplyFn& apply, const ApplyFn& apply_transpose, GeometryPtr geometry,
                                    std::uint64_t seed = 12345, int max_iterations = 3000, double tol = 1e-12);

/// ||[Q,H]|| estimate; [Q,H] is antisymmetric.
NormEstimate commutator_q_h_norm(const Hamiltonian& h, int max_iterations = 3000);

/// ||[H,Q^m] Q^{-(m-1)}|| estimate (the measured constant of the m-th order
/// hopping bound), m in {1,2,3,...}.
NormEstimate hqm_ratio_norm(const Hamiltonian& h, int m, int max_iterations = 2000);

} // namespace ballistic
