#pragma once

#include <map>
#include <stdexcept>

#include "ballistic/spectral.hpp"

namespace ballistic {

/// Enclosure of the spectrum of the truncated H (Dirichlet truncation only
/// shrinks the spectrum, so the a-priori interval is always valid).
struct SpectralBounds {
    double e_min = 0;
    double e_max = 0;
    double center() const { return 0.5 * (e_max + e_min); }
    double half_width() const { return 0.5 * (e_max - e_min); }
};

/// [-2d - ||V||_inf - margin, 2d + ||V||_inf + margin],
/// margin = 1e-6 (4d + 2||V||_inf).
SpectralBounds estimate_spectral_bounds(const Hamiltonian& h);

/// Thrown when per-step norm conservation degrades past the abort threshold,
/// signalling a spectral-bound violation. Exponent fits built on such a run
/// would be garbage, so the run dies instead.
struct NormDriftError : std::runtime_error {
    explicit NormDriftError(double drift_)
        : std::runtime_error("propagation norm drift " + std::to_string(drift_) + " exceeds 1e-9"), drift(drift_) {}
    double drift;
};

inline constexpr double kNormDriftAbort = 1e-9;

/// One-step expansion of exp(-i tau H): coefficients c_k = (2-delta_k0)
/// (-i)^k J_k(a tau) on Chebyshev polynomials of the rescaled Hamiltonian.
/// Bessel magnitudes come from the downward (Miller) recurrence normalized by
/// the closure identity J_0 + 2 sum J_{2m} = 1.
struct ChebyshevPlan {
    SpectralBounds bounds;
    double tau = 0;
    double tolerance = 0;
    int order = 0;               // K: truncation order, |c_K| <= tolerance
    std::vector<double> bessel;  // J_k(a tau), k = 0..K
};

ChebyshevPlan plan_chebyshev(const SpectralBounds& bounds, double tau, double tolerance);

/// J_k(z) for k = 0..kmax by the downward recurrence (exposed for tests).
std::vector<double> bessel_j_table(double z, int kmax);

/// psi(t + tau), one plan step. Norm is conserved to ~tolerance per step;
/// drift beyond 1e-9 raises NormDriftError.
LatticeState propagate(const Hamiltonian& h, const ChebyshevPlan& plan, const LatticeState& state);

/// Multi-step driver: splits an arbitrary advance into base-tau steps plus a
/// remainder plan, caching plans per distinct step size. The plan depends
/// only on (half_width * dt, tolerance), so one plan amortizes over thousands
/// of steps.
class ChebyshevPropagator {
public:
    ChebyshevPropagator(const Hamiltonian& h, double base_tau, double tolerance);

    /// Default step: half_width * tau ~ 20.
    static double default_tau(const SpectralBounds& bounds) { return 20.0 / bounds.half_width(); }

    const SpectralBounds& bounds() const { return bounds_; }
    double base_tau() const { return base_tau_; }
    double tolerance() const { return tolerance_; }
    int base_order() const;

    /// Advance the state in place by dt >= 0.
    void advance(LatticeState& state, double dt) const;

private:
    const ChebyshevPlan& plan_for(double dt) const;

    const Hamiltonian* h_;
    SpectralBounds bounds_;
    double base_tau_;
    double tolerance_;
    mutable std::map<double, ChebyshevPlan> plans_;
};

/// Latest time a finite-box run stays faithful to the infinite lattice:
/// safety * (L - initial_support_radius) / (2d). Group speed per axis is 2
/// for hopping amplitude 1.
double light_cone_horizon(const BoxGeometry& geometry, int initial_support_radius, double safety);

/// Radius of the smallest origin-centered ball holding all amplitudes above
/// 1e-12 of the max; the support radius fed to the horizon rule.
int support_radius(const LatticeState& state);

} // namespace ballistic
