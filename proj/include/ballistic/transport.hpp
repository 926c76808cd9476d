#pragma once

#include <string>

#include "ballistic/propagation.hpp"

namespace ballistic {

/// Time series of weighted norms and ball probabilities along one
/// propagation sweep.
struct MomentSeries {
    std::vector<double> orders;
    std::vector<int> ball_radii;
    std::vector<double> times;
    std::vector<double> norm0;               // l2 norm per sample (unitarity witness)
    std::vector<std::vector<double>> norms;  // [sample][order]
    std::vector<std::vector<double>> ball;   // [sample][radius]
    double horizon = 0;
    std::string provenance; // config hash

    std::size_t order_index(double r) const;
    std::size_t radius_index(int n) const;
};

/// One sweep, sampling moments at the given times (ascending, within the
/// horizon). Orders are capped to [0,3] to keep weights within double range.
MomentSeries record_moments(const Hamiltonian& h, const ChebyshevPropagator& propagator,
                            const LatticeState& initial, std::span<const double> orders,
                            std::span<const double> times, std::span<const int> ball_radii, double horizon,
                            std::string provenance = {});

struct ExponentFit {
    double r = 0;
    double t_lo = 0, t_hi = 0;
    int n_samples = 0;
    double slope = 0;        // OLS slope of log||psi||_r against r log t; 1 = ballistic
    double intercept = 0;    // in the r log t frame
    double residual_rms = 0;
    double slope_spread = 0; // |slope(first half) - slope(second half)|
    double ratio_min = 0;    // band of ||psi(t)||_r / t^r over the window
    double ratio_max = 0;

    bool ballistic(double tol) const { return slope >= 1.0 - tol && slope <= 1.0 + tol; }
};

/// Requires >= 8 samples in the window and t_lo >= 1.
ExponentFit fit_transport_exponent(const MomentSeries& series, double r, double t_lo, double t_hi);

struct UpperBoundReport {
    double c1_hat = 0;          // ||[Q,H]|| estimate
    double u_norm0 = 0, u_norm1 = 0, u_norm2 = 0;
    bool order1_violation = false;
    double order1_worst_margin = 0; // max over samples of ||psi||_1 - envelope (negative = slack)
    double c2_min = 0;              // minimal admissible c2 over samples with t > 0
    double c2_reference = 0;        // c1_hat / 2
};

/// Order-1 envelope ||psi(t)||_1 <= ||u||_1 + c1 ||u||_0 t (theorem-backed)
/// and the measured minimal order-2 coefficient. Pass c1_hat <= 0 to estimate
/// ||[Q,H]|| on this H by power iteration.
UpperBoundReport check_upper_bounds(const MomentSeries& series, const Hamiltonian& h, const LatticeState& initial,
                                    double c1_hat = -1.0);

struct HeisenbergCheck {
    double max_defect = 0;     // max_t |LHS - RHS|
    double max_im = 0;         // max_t |Im RHS|
    bool quadrature_converged = true;
    double theta_eff = 0;      // measured windowed Mourre minimum (bulk form)
    double integral_margin = 0; // min_t of integral_term - (theta_eff/2)||chi u||^2 t^2
    int window_rank = 0;
};

/// Two-route check of the Heisenberg expansion of ||Q e^{-itH} chi_I u||^2:
/// oracle evaluation against  <x,Q^2 x> - it <x,[H,-Q^2]x>
/// + int_0^t (t-sigma) <phi(sigma),[H,[H,-Q^2]] phi(sigma)> dsigma  with the
/// compositional (box) brackets, which make the identity exact. Quadrature is
/// composite Simpson with step halving until three digits stabilize.
HeisenbergCheck heisenberg_expansion_check(const SpectralDecomposition& dec, const Hamiltonian& h,
                                           const EnergyInterval& interval, const LatticeState& u,
                                           std::span<const double> t_grid);

struct CrossTermSeries {
    std::vector<double> times;
    std::vector<double> c_abs;       // |C_{I,J}(t)|
    std::vector<bool> almost_orthog; // ||Q e (chi_I + chi_J) u|| > max(...)/2
    double almost_orthog_fraction = 0;
    double c0_consistency = 0;       // two-route defect of C(0)
    double norm1_bound = 0;          // (||chi_I u||_1^2 + ||chi_J u||_1^2) / 2
    double max_c_abs = 0;
};

CrossTermSeries cross_term_series(const SpectralDecomposition& dec, const EnergyInterval& window_i,
                                  const EnergyInterval& window_j, const LatticeState& u,
                                  std::span<const double> t_grid);

struct RageRadiusReport {
    int radius = 0;
    double sup_ball = 0;        // pp signature when large
    double time_avg_final = 0;  // (1/T) integral of P_N over the sampled range
    double time_avg_half = 0;   // same over the first half of the range
    double tail_pointwise = 0;  // mean of the last three samples
    std::string label;          // verdict label only, no hard assertion
};

std::vector<RageRadiusReport> rage_diagnostics(const MomentSeries& series);

struct MomentInequalityReport {
    int jensen_checks = 0;
    int jensen_violations = 0;
    double jensen_worst_slack = 0; // most negative relative margin observed
    int interp_checks = 0;
    int interp_violations = 0;
    double interp_worst_slack = 0;
};

/// Per-sample Jensen (S_{r'} / S_0 >= (S_r / S_0)^{r'/r}) and log-convexity
/// interpolation over consecutive order triples, at 1e-12 relative slack.
MomentInequalityReport check_moment_inequalities(const MomentSeries& series);

} // namespace ballistic
