#include "ballistic/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ballistic {

EnergyInterval::EnergyInterval(double lo_, double hi_, bool lo_closed_, bool hi_closed_)
    : lo(lo_), hi(hi_), lo_closed(lo_closed_), hi_closed(hi_closed_) {
    if (lo > hi) throw std::invalid_argument("energy interval requires lo <= hi");
    if (lo == hi && !(lo_closed && hi_closed))
        throw std::invalid_argument("degenerate energy interval must be closed");
}

bool EnergyInterval::contains(double e) const {
    const bool above = lo_closed ? (e >= lo - kEndpointTieBreak) : (e > lo);
    const bool below = hi_closed ? (e <= hi + kEndpointTieBreak) : (e < hi);
    return above && below;
}

EnergyInterval EnergyInterval::j_theta(double theta, int dimension) {
    const double band = 2.0 * dimension;
    if (!(theta > 0) || theta > band) throw std::invalid_argument("j_theta requires 0 < theta <= 2d");
    return EnergyInterval(-band + theta, band - theta, true, true);
}

EnergyInterval EnergyInterval::whole_line() {
    return EnergyInterval(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

SpectralDecomposition dense_eigendecomposition(const Hamiltonian& h, std::int64_t dense_cap) {
    DenseOperator dense = materialize_dense([&h](const LatticeState& s) { return apply_hamiltonian(h, s); },
                                            h.geometry_ptr(), "H", dense_cap);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense.mat);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigendecomposition failed");
    SpectralDecomposition dec;
    dec.geometry = h.geometry_ptr();
    dec.eigenvalues = es.eigenvalues();
    dec.eigenvectors = es.eigenvectors();
    Eigen::MatrixXd resid = dense.mat * dec.eigenvectors - dec.eigenvectors * dec.eigenvalues.asDiagonal();
    dec.residual = resid.colwise().norm().maxCoeff();
    return dec;
}

std::pair<int, int> mode_range(const SpectralDecomposition& dec, const EnergyInterval& interval) {
    // Eigenvalues ascend, so the window selects a contiguous index block.
    const int n = static_cast<int>(dec.eigenvalues.size());
    int first = 0;
    while (first < n && !interval.contains(dec.eigenvalues[first])) ++first;
    int last = first;
    while (last < n && interval.contains(dec.eigenvalues[last])) ++last;
    return {first, last};
}

namespace {

Eigen::VectorXcd to_eigen(const LatticeState& s) {
    const auto amp = s.amplitudes();
    return Eigen::Map<const Eigen::VectorXcd>(amp.data(), static_cast<Eigen::Index>(amp.size()));
}

LatticeState from_eigen(GeometryPtr g, const Eigen::VectorXcd& v) {
    LatticeState s(std::move(g));
    auto amp = s.amplitudes();
    Eigen::Map<Eigen::VectorXcd>(amp.data(), static_cast<Eigen::Index>(amp.size())) = v;
    return s;
}

/// Columns of B*P for a matrix-free operator apply acting on real columns.
Eigen::MatrixXd apply_to_columns(const Hamiltonian& h,
                                 LatticeState (*op)(const Hamiltonian&, const LatticeState&),
                                 const Eigen::Ref<const Eigen::MatrixXd>& p) {
    const auto n = p.rows();
    Eigen::MatrixXd out(n, p.cols());
    LatticeState buf = LatticeState::zero(h.geometry_ptr());
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
        auto amp = buf.amplitudes();
        for (Eigen::Index r = 0; r < n; ++r) amp[static_cast<std::size_t>(r)] = p(r, c);
        LatticeState col = op(h, buf);
        for (Eigen::Index r = 0; r < n; ++r) out(r, c) = col[r].real();
    }
    return out;
}

} // namespace

LatticeState spectral_projection_apply(const SpectralDecomposition& dec, const EnergyInterval& interval,
                                       const LatticeState& state) {
    if (!(*dec.geometry == state.geometry())) throw std::invalid_argument("geometry mismatch in projection");
    auto [first, last] = mode_range(dec, interval);
    if (first >= last) return LatticeState::zero(state.geometry_ptr());
    const auto p = dec.eigenvectors.middleCols(first, last - first);
    Eigen::VectorXcd x = to_eigen(state);
    Eigen::VectorXd yr = p * (p.transpose() * x.real().matrix()).eval();
    Eigen::VectorXd yi = p * (p.transpose() * x.imag().matrix()).eval();
    Eigen::VectorXcd y = yr.cast<cplx>() + cplx(0, 1) * yi.cast<cplx>();
    return from_eigen(state.geometry_ptr(), y);
}

LatticeState dense_oracle_propagate(const SpectralDecomposition& dec, const LatticeState& state, double t) {
    if (!(*dec.geometry == state.geometry())) throw std::invalid_argument("geometry mismatch in oracle propagation");
    const Eigen::MatrixXd& u = dec.eigenvectors;
    Eigen::VectorXcd x = to_eigen(state);
    Eigen::VectorXd cr = u.transpose() * x.real().matrix();
    Eigen::VectorXd ci = u.transpose() * x.imag().matrix();
    Eigen::VectorXd dr(cr.size()), di(cr.size());
    for (Eigen::Index k = 0; k < cr.size(); ++k) {
        const double th = t * dec.eigenvalues[k];
        const double c = std::cos(th), s = std::sin(th);
        dr[k] = cr[k] * c + ci[k] * s; // (cr + i ci) e^{-i th}
        di[k] = ci[k] * c - cr[k] * s;
    }
    Eigen::VectorXd yr = u * dr, yi = u * di;
    Eigen::VectorXcd y = yr.cast<cplx>() + cplx(0, 1) * yi.cast<cplx>();
    return from_eigen(state.geometry_ptr(), y);
}

MourreFormResult mourre_form_min(const SpectralDecomposition& dec, const Hamiltonian& h,
                                 const EnergyInterval& interval) {
    auto [first, last] = mode_range(dec, interval);
    const int m = last - first;
    if (m <= 0) throw std::invalid_argument("mourre_form_min: window contains no eigenvalue");
    const auto p = dec.eigenvectors.middleCols(first, m);
    Eigen::MatrixXd bp = apply_to_columns(h, &apply_double_commutator_bulk, p);
    Eigen::MatrixXd form = p.transpose() * bp;
    MourreFormResult res;
    res.window_rank = m;
    res.symmetry_defect = (form - form.transpose()).cwiseAbs().maxCoeff();
    form = 0.5 * (form + form.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form);
    if (es.info() != Eigen::Success) throw std::runtime_error("mourre form eigensolve failed");
    res.min_rayleigh = es.eigenvalues()[0];
    res.witness = p * es.eigenvectors().col(0);
    return res;
}

namespace {

/// Spectral norm of chi_I K chi_I with K = [V,[H,-Q^2]]: the norm of the
/// compressed block P^T K P.
double windowed_compact_norm(const SpectralDecomposition& dec, const Hamiltonian& h, int first, int m) {
    if (m <= 0) return 0.0;
    const auto p = dec.eigenvectors.middleCols(first, m);
    Eigen::MatrixXd kp = apply_to_columns(h, &apply_potential_correction, p);
    Eigen::MatrixXd kc = p.transpose() * kp;
    kc = 0.5 * (kc + kc.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kc);
    if (es.info() != Eigen::Success) throw std::runtime_error("compact block eigensolve failed");
    return std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[m - 1]));
}

} // namespace

CompactSplitReport mourre_compact_split(const SpectralDecomposition& free_dec, const SpectralDecomposition& full_dec,
                                        const Hamiltonian& h, const EnergyInterval& interval) {
    CompactSplitReport rep;
    auto [ff, fl] = mode_range(free_dec, interval);
    rep.rank_free = fl - ff;
    if (rep.rank_free <= 0) throw std::invalid_argument("mourre_compact_split: empty free window");
    const Hamiltonian free_h = free_hamiltonian(h.geometry_ptr());
    rep.min_rayleigh_free = mourre_form_min(free_dec, free_h, interval).min_rayleigh;

    auto [uf, ul] = mode_range(full_dec, interval);
    rep.rank_full = ul - uf;
    rep.compact_norm = windowed_compact_norm(full_dec, h, uf, rep.rank_full);
    rep.certified_bound = rep.min_rayleigh_free - rep.compact_norm;
    return rep;
}

std::vector<ShrinkScanRow> shrink_interval_scan(const SpectralDecomposition& free_dec,
                                                const SpectralDecomposition& full_dec, const Hamiltonian& h,
                                                const EnergyInterval& base, double e0,
                                                std::span<const double> deltas, double theta) {
    if (!base.contains(e0)) throw std::invalid_argument("shrink_interval_scan: E_0 outside the base window");
    const Hamiltonian free_h = free_hamiltonian(h.geometry_ptr());
    std::vector<ShrinkScanRow> rows;
    rows.reserve(deltas.size());
    for (double delta : deltas) {
        ShrinkScanRow row;
        row.delta = delta;
        row.lo = std::max(base.lo, e0 - delta);
        row.hi = std::min(base.hi, e0 + delta);
        EnergyInterval window(row.lo, row.hi);
        auto [uf, ul] = mode_range(full_dec, window);
        row.rank = ul - uf;
        row.compact_norm = windowed_compact_norm(full_dec, h, uf, row.rank);
        auto [ff, fl] = mode_range(free_dec, window);
        if (fl > ff) {
            row.min_rayleigh_free = mourre_form_min(free_dec, free_h, window).min_rayleigh;
            row.certified_bound = row.min_rayleigh_free - row.compact_norm;
        } else {
            row.min_rayleigh_free = std::numeric_limits<double>::quiet_NaN();
            row.certified_bound = std::numeric_limits<double>::quiet_NaN();
        }
        row.below_half_theta = row.compact_norm <= 0.5 * theta;
        rows.push_back(row);
    }
    return rows;
}

ModeStats mode_delocalization(const SpectralDecomposition& dec) {
    const BoxGeometry& g = *dec.geometry;
    const auto n = dec.eigenvectors.rows();
    const int L = g.radius();
    std::vector<bool> near_edge(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto site = g.site_of(i);
        bool edge = false;
        for (int c : site)
            if (std::abs(c) >= L - 2) edge = true;
        near_edge[static_cast<std::size_t>(i)] = edge;
    }
    ModeStats stats;
    stats.ipr.resize(static_cast<std::size_t>(dec.eigenvectors.cols()));
    stats.boundary_weight.resize(static_cast<std::size_t>(dec.eigenvectors.cols()));
    for (Eigen::Index k = 0; k < dec.eigenvectors.cols(); ++k) {
        double ipr = 0, bw = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = dec.eigenvectors(i, k) * dec.eigenvectors(i, k);
            ipr += p * p;
            if (near_edge[static_cast<std::size_t>(i)]) bw += p;
        }
        stats.ipr[static_cast<std::size_t>(k)] = ipr;
        stats.boundary_weight[static_cast<std::size_t>(k)] = bw;
    }
    return stats;
}

LatticeState AcSurrogateProjector::apply(const LatticeState& state) const {
    const SpectralDecomposition& dec = *decomposition;
    if (!(*dec.geometry == state.geometry())) throw std::invalid_argument("geometry mismatch in projector");
    LatticeState out = LatticeState::zero(state.geometry_ptr());
    if (modes.empty()) return out;
    Eigen::VectorXcd x = to_eigen(state);
    Eigen::VectorXd re = x.real(), im = x.imag();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    for (int k : modes) {
        const auto v = dec.eigenvectors.col(k);
        const cplx c(v.dot(re), v.dot(im));
        y += c * v.cast<cplx>();
    }
    return from_eigen(state.geometry_ptr(), y);
}

AcSurrogateProjector ac_surrogate_projection(std::shared_ptr<const SpectralDecomposition> dec,
                                             const EnergyInterval& interval, double ipr_threshold,
                                             double boundary_threshold) {
    if (!(ipr_threshold > 0 && ipr_threshold < 1) || !(boundary_threshold > 0 && boundary_threshold < 1))
        throw std::invalid_argument("surrogate thresholds must lie in (0,1)");
    ModeStats stats = mode_delocalization(*dec);
    auto [first, last] = mode_range(*dec, interval);
    AcSurrogateProjector proj;
    proj.decomposition = std::move(dec);
    for (int k = first; k < last; ++k) {
        if (stats.ipr[static_cast<std::size_t>(k)] <= ipr_threshold &&
            stats.boundary_weight[static_cast<std::size_t>(k)] <= boundary_threshold)
            proj.modes.push_back(k);
    }
    return proj;
}

} // namespace ballistic
