#include "ballistic/propagation.hpp"

#include <algorithm>
#include <cmath>

namespace ballistic {

SpectralBounds estimate_spectral_bounds(const Hamiltonian& h) {
    const double d = h.geometry().dimension();
    const double vsup = h.potential().sup_norm();
    const double margin = 1e-6 * (4.0 * d + 2.0 * vsup);
    return SpectralBounds{-2.0 * d - vsup - margin, 2.0 * d + vsup + margin};
}

std::vector<double> bessel_j_table(double z, int kmax) {
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    // Start the downward recurrence well above both kmax and the turning
    // point k ~ z; everything above the start order is treated as zero.
    const int base = std::max(kmax, static_cast<int>(std::ceil(z)));
    const int start = base + 40 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(base)));
    std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
    f[static_cast<std::size_t>(start) + 1] = 0.0;
    f[static_cast<std::size_t>(start)] = 1e-280;
    for (int k = start; k >= 1; --k) {
        f[static_cast<std::size_t>(k) - 1] =
            (2.0 * k / z) * f[static_cast<std::size_t>(k)] - f[static_cast<std::size_t>(k) + 1];
        if (std::abs(f[static_cast<std::size_t>(k) - 1]) > 1e260) {
            for (std::size_t i = static_cast<std::size_t>(k) - 1; i < f.size(); ++i) f[i] *= 1e-260;
        }
    }
    double closure = f[0];
    for (std::size_t k = 2; k < f.size(); k += 2) closure += 2.0 * f[k];
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k)] / closure;
    return out;
}

ChebyshevPlan plan_chebyshev(const SpectralBounds& bounds, double tau, double tolerance) {
    if (tau < 0) throw std::invalid_argument("plan_chebyshev requires tau >= 0");
    if (!(tolerance > 0 && tolerance < 1)) throw std::invalid_argument("plan tolerance must lie in (0,1)");
    ChebyshevPlan plan;
    plan.bounds = bounds;
    plan.tau = tau;
    plan.tolerance = tolerance;
    const double z = bounds.half_width() * tau;
    if (z == 0.0) {
        plan.order = 0;
        plan.bessel = {1.0};
        return plan;
    }
    const int cap = static_cast<int>(10.0 * (z + 50.0));
    // Coefficients only decay beyond the light-cone order k ~ z; scan for the
    // first K >= ceil(z) where |c_K| and |c_{K+1}| are both under tolerance
    // (two consecutive values so an oscillation zero cannot truncate early).
    int guess = static_cast<int>(std::ceil(z)) + 40 + static_cast<int>(2.0 * std::pow(z, 0.55));
    while (true) {
        if (guess > cap + 2) throw std::runtime_error("chebyshev plan: tolerance unachievable below hard cap");
        std::vector<double> j = bessel_j_table(z, guess);
        int k = static_cast<int>(std::ceil(z));
        for (; k + 1 <= guess; ++k) {
            if (2.0 * std::abs(j[static_cast<std::size_t>(k)]) <= tolerance &&
                2.0 * std::abs(j[static_cast<std::size_t>(k) + 1]) <= tolerance)
                break;
        }
        if (k + 1 <= guess) {
            plan.order = k;
            j.resize(static_cast<std::size_t>(k) + 1);
            plan.bessel = std::move(j);
            return plan;
        }
        guess = std::min(2 * guess, cap + 2);
    }
}

namespace {

/// y += c * x for complex coefficient on i^k-cycled Bessel weights.
void accumulate(std::vector<cplx>& acc, const std::vector<cplx>& term, cplx coeff) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += coeff * term[i];
}

} // namespace

LatticeState propagate(const Hamiltonian& h, const ChebyshevPlan& plan, const LatticeState& state) {
    if (!(h.geometry() == state.geometry())) throw std::invalid_argument("geometry mismatch in propagate");
    const std::size_t n = static_cast<std::size_t>(h.geometry().total_sites());
    const double a = plan.bounds.half_width();
    const double b = plan.bounds.center();
    const double norm_in = state.norm();

    // Clenshaw-free forward recurrence: T_0 = psi, T_1 = Htilde psi,
    // T_{k+1} = 2 Htilde T_k - T_{k-1}; acc = sum c_k T_k with
    // c_k = (2-delta_k0)(-i)^k J_k(a tau).
    std::vector<cplx> t0(state.amplitudes().begin(), state.amplitudes().end());
    std::vector<cplx> acc(n);
    for (std::size_t i = 0; i < n; ++i) acc[i] = plan.bessel[0] * t0[i];
    if (plan.order >= 1) {
        std::vector<cplx> t1(n), t2(n);
        h.apply_scaled(t0, t1, b, a);
        const cplx minus_i(0.0, -1.0);
        cplx ik = minus_i; // (-i)^k
        accumulate(acc, t1, 2.0 * plan.bessel[1] * ik);
        for (int k = 2; k <= plan.order; ++k) {
            h.apply_scaled(t1, t2, b, a);
            for (std::size_t i = 0; i < n; ++i) t2[i] = 2.0 * t2[i] - t0[i];
            ik *= minus_i;
            accumulate(acc, t2, 2.0 * plan.bessel[static_cast<std::size_t>(k)] * ik);
            std::swap(t0, t1);
            std::swap(t1, t2);
        }
    }
    // Global phase from the spectral shift.
    const cplx phase = std::polar(1.0, -b * plan.tau);
    for (cplx& x : acc) x *= phase;

    LatticeState out(state.geometry_ptr(), std::move(acc));
    const double drift = std::abs(out.norm() - norm_in);
    if (drift > kNormDriftAbort) throw NormDriftError(drift);
    return out;
}

ChebyshevPropagator::ChebyshevPropagator(const Hamiltonian& h, double base_tau, double tolerance)
    : h_(&h), bounds_(estimate_spectral_bounds(h)), base_tau_(base_tau), tolerance_(tolerance) {
    if (!(base_tau > 0)) throw std::invalid_argument("base tau must be positive");
    if (!(tolerance > 0 && tolerance < 1)) throw std::invalid_argument("propagator tolerance must lie in (0,1)");
}

const ChebyshevPlan& ChebyshevPropagator::plan_for(double dt) const {
    auto it = plans_.find(dt);
    if (it == plans_.end()) it = plans_.emplace(dt, plan_chebyshev(bounds_, dt, tolerance_)).first;
    return it->second;
}

int ChebyshevPropagator::base_order() const { return plan_for(base_tau_).order; }

void ChebyshevPropagator::advance(LatticeState& state, double dt) const {
    if (dt < 0) throw std::invalid_argument("advance requires dt >= 0");
    if (dt == 0) return;
    const auto steps = static_cast<std::int64_t>(std::floor(dt / base_tau_));
    const double remainder = dt - static_cast<double>(steps) * base_tau_;
    if (steps > 0) {
        const ChebyshevPlan& plan = plan_for(base_tau_);
        for (std::int64_t s = 0; s < steps; ++s) state = propagate(*h_, plan, state);
    }
    if (remainder > 1e-14 * std::max(1.0, dt)) state = propagate(*h_, plan_for(remainder), state);
}

double light_cone_horizon(const BoxGeometry& geometry, int initial_support_radius, double safety) {
    if (!(safety > 0 && safety < 1)) throw std::invalid_argument("safety factor must lie in (0,1)");
    if (initial_support_radius < 0 || initial_support_radius >= geometry.radius())
        throw std::invalid_argument("initial support must lie strictly inside the box");
    return safety * (geometry.radius() - initial_support_radius) / (2.0 * geometry.dimension());
}

int support_radius(const LatticeState& state) {
    const auto amp = state.amplitudes();
    double peak = 0;
    for (const cplx& a : amp) peak = std::max(peak, std::abs(a));
    if (peak == 0) return 0;
    const auto n2 = state.geometry().norm2_table();
    double r2max = 0;
    for (std::size_t i = 0; i < amp.size(); ++i)
        if (std::abs(amp[i]) > 1e-12 * peak) r2max = std::max(r2max, n2[i]);
    return static_cast<int>(std::ceil(std::sqrt(r2max)));
}

} // namespace ballistic
