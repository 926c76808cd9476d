#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "ballistic/operators.hpp"

namespace ballistic {

/// Energy window. Closed endpoints include eigenvalues within 1e-12 of the
/// endpoint (documented tie-break); open endpoints are strict. On a discrete
/// spectrum the flags only matter at exact collisions.
struct EnergyInterval {
    double lo = 0;
    double hi = 0;
    bool lo_closed = true;
    bool hi_closed = true;

    EnergyInterval() = default;
    EnergyInterval(double lo_, double hi_, bool lo_closed_ = true, bool hi_closed_ = true);

    bool contains(double e) const;

    /// J_theta = (-2d+theta, 2d-theta), 0 < theta <= 2d. At theta = 2d the
    /// window degenerates to the closed point [0,0], which still captures an
    /// exact band-center eigenvalue under the tie-break.
    static EnergyInterval j_theta(double theta, int dimension);
    static EnergyInterval whole_line();
};

inline constexpr double kEndpointTieBreak = 1e-12;

/// Full eigenpairs of the dense finite-box Hamiltonian; the oracle for every
/// projection and propagation check.
struct SpectralDecomposition {
    GeometryPtr geometry;
    Eigen::VectorXd eigenvalues; // ascending
    Eigen::MatrixXd eigenvectors; // column k <-> eigenvalue k
    double residual = 0;          // max_k ||H v_k - lambda_k v_k||
};

SpectralDecomposition dense_eigendecomposition(const Hamiltonian& h, std::int64_t dense_cap = kDefaultDenseCap);

/// Contiguous eigenvalue index range [first, last) falling in the window.
std::pair<int, int> mode_range(const SpectralDecomposition& dec, const EnergyInterval& interval);

LatticeState spectral_projection_apply(const SpectralDecomposition& dec, const EnergyInterval& interval,
                                       const LatticeState& state);

/// psi(t) = U exp(-it Lambda) U^T psi(0); unitary up to eigensolver accuracy.
LatticeState dense_oracle_propagate(const SpectralDecomposition& dec, const LatticeState& state, double t);

struct MourreFormResult {
    double min_rayleigh = 0;
    int window_rank = 0;
    double symmetry_defect = 0; // max |M - M^T| before symmetrization
    Eigen::VectorXd witness;    // argmin vector in the site basis
};

/// Minimal eigenvalue of P^T [H,[H,-Q^2]] P over the span of the window's
/// eigenvectors, with the double commutator in its translation-invariant
/// (bulk) form. Throws on an empty window.
MourreFormResult mourre_form_min(const SpectralDecomposition& dec, const Hamiltonian& h,
                                 const EnergyInterval& interval);

struct CompactSplitReport {
    double min_rayleigh_free = 0; // windowed bulk form on the free decomposition
    double compact_norm = 0;      // || chi_I [V,[H,-Q^2]] chi_I ||
    double certified_bound = 0;   // min_rayleigh_free - compact_norm
    int rank_full = 0;
    int rank_free = 0;
};

CompactSplitReport mourre_compact_split(const SpectralDecomposition& free_dec, const SpectralDecomposition& full_dec,
                                        const Hamiltonian& h, const EnergyInterval& interval);

struct ShrinkScanRow {
    double delta = 0;
    double lo = 0, hi = 0;   // realized window I_1(delta)
    int rank = 0;            // modes of the full H inside
    double compact_norm = 0;
    double min_rayleigh_free = 0; // NaN when the free window is empty
    double certified_bound = 0;   // NaN when the free window is empty
    bool below_half_theta = false;
};

/// Window-shrinking scan: I_1(delta) = (E_0-delta, E_0+delta) intersected
/// with `base`. Monotonicity in delta is reported, not asserted.
std::vector<ShrinkScanRow> shrink_interval_scan(const SpectralDecomposition& free_dec,
                                                const SpectralDecomposition& full_dec, const Hamiltonian& h,
                                                const EnergyInterval& base, double e0,
                                                std::span<const double> deltas, double theta);

struct ModeStats {
    std::vector<double> ipr;             // sum |v_n|^4 per eigenvector
    std::vector<double> boundary_weight; // mass within distance 2 of the box edge
};

ModeStats mode_delocalization(const SpectralDecomposition& dec);

/// Projector onto the delocalized, boundary-light eigenmodes in a window:
/// the finite-box surrogate for the absolutely continuous subspace. May be
/// empty; apply() then returns the zero state.
struct AcSurrogateProjector {
    std::shared_ptr<const SpectralDecomposition> decomposition;
    std::vector<int> modes;

    bool empty() const { return modes.empty(); }
    LatticeState apply(const LatticeState& state) const;
};

AcSurrogateProjector ac_surrogate_projection(std::shared_ptr<const SpectralDecomposition> dec,
                                             const EnergyInterval& interval, double ipr_threshold,
                                             double boundary_threshold);

} // namespace ballistic
