#include "ballistic/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ballistic {

std::size_t MomentSeries::order_index(double r) const {
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (orders[i] == r) return i;
    throw std::invalid_argument("order not recorded in series");
}

std::size_t MomentSeries::radius_index(int n) const {
    for (std::size_t i = 0; i < ball_radii.size(); ++i)
        if (ball_radii[i] == n) return i;
    throw std::invalid_argument("ball radius not recorded in series");
}

MomentSeries record_moments(const Hamiltonian& h, const ChebyshevPropagator& propagator,
                            const LatticeState& initial, std::span<const double> orders,
                            std::span<const double> times, std::span<const int> ball_radii, double horizon,
                            std::string provenance) {
    if (!(h.geometry() == initial.geometry()))
        throw std::invalid_argument("geometry mismatch between Hamiltonian and initial state");
    for (double r : orders)
        if (!(r >= 0 && r <= 3)) throw std::invalid_argument("moment orders must lie in [0,3]");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || (i > 0 && times[i] <= times[i - 1]))
            throw std::invalid_argument("sample times must be nonnegative and strictly increasing");
        if (times[i] > horizon * (1 + 1e-12))
            throw std::invalid_argument("sample time " + std::to_string(times[i]) +
                                        " violates the light-cone horizon rule (t_max = " + std::to_string(horizon) +
                                        ")");
    }
    MomentSeries s;
    s.orders.assign(orders.begin(), orders.end());
    s.ball_radii.assign(ball_radii.begin(), ball_radii.end());
    s.horizon = horizon;
    s.provenance = std::move(provenance);

    LatticeState psi = initial;
    double prev = 0;
    for (double t : times) {
        propagator.advance(psi, t - prev);
        prev = t;
        s.times.push_back(t);
        s.norm0.push_back(psi.norm());
        std::vector<double> row;
        row.reserve(orders.size());
        for (double r : orders) row.push_back(weighted_norm(psi, r));
        s.norms.push_back(std::move(row));
        std::vector<double> brow;
        brow.reserve(ball_radii.size());
        for (int n : ball_radii) brow.push_back(ball_probability(psi, n));
        s.ball.push_back(std::move(brow));
    }
    return s;
}

namespace {

struct LineFit {
    double slope, intercept, residual_rms;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0) throw std::invalid_argument("degenerate fit window");
    LineFit f{};
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss += e * e;
    }
    f.residual_rms = std::sqrt(ss / n);
    return f;
}

} // namespace

ExponentFit fit_transport_exponent(const MomentSeries& series, double r, double t_lo, double t_hi) {
    if (!(r > 0)) throw std::invalid_argument("exponent fit requires r > 0");
    if (!(t_lo >= 1)) throw std::invalid_argument("fit window must start at t >= 1");
    if (!(t_lo < t_hi)) throw std::invalid_argument("degenerate fit window");
    const std::size_t col = series.order_index(r);
    std::vector<double> x, y, ratio;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_lo || t > t_hi) continue;
        const double m = series.norms[i][col];
        if (!(m > 0)) throw std::invalid_argument("zero norm inside fit window");
        x.push_back(r * std::log(t));
        y.push_back(std::log(m));
        ratio.push_back(m / std::pow(t, r));
    }
    if (x.size() < 8) throw std::invalid_argument("fit window holds fewer than 8 samples");

    ExponentFit fit;
    fit.r = r;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.n_samples = static_cast<int>(x.size());
    const LineFit full = least_squares(x, y);
    fit.slope = full.slope;
    fit.intercept = full.intercept;
    fit.residual_rms = full.residual_rms;
    const std::size_t half = x.size() / 2;
    const LineFit a = least_squares(std::span(x).subspan(0, half), std::span(y).subspan(0, half));
    const LineFit b = least_squares(std::span(x).subspan(half), std::span(y).subspan(half));
    fit.slope_spread = std::abs(a.slope - b.slope);
    fit.ratio_min = *std::min_element(ratio.begin(), ratio.end());
    fit.ratio_max = *std::max_element(ratio.begin(), ratio.end());
    return fit;
}

UpperBoundReport check_upper_bounds(const MomentSeries& series, const Hamiltonian& h, const LatticeState& initial,
                                    double c1_hat) {
    UpperBoundReport rep;
    const std::size_t c1col = series.order_index(1.0);
    const std::size_t c2col = series.order_index(2.0);
    rep.c1_hat = c1_hat > 0 ? c1_hat : commutator_q_h_norm(h).value;
    rep.u_norm0 = initial.norm();
    rep.u_norm1 = weighted_norm(initial, 1.0);
    rep.u_norm2 = weighted_norm(initial, 2.0);
    rep.c2_reference = 0.5 * rep.c1_hat;
    rep.order1_worst_margin = -std::numeric_limits<double>::infinity();
    rep.c2_min = 0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        const double envelope = rep.u_norm1 + rep.c1_hat * rep.u_norm0 * t;
        const double margin = series.norms[i][c1col] - envelope;
        rep.order1_worst_margin = std::max(rep.order1_worst_margin, margin);
        if (margin > 1e-9 * std::max(1.0, envelope)) rep.order1_violation = true;
        if (t > 0) {
            const double c2 = (series.norms[i][c2col] - rep.u_norm2 - rep.u_norm1 * t) / (rep.u_norm0 * t * t);
            rep.c2_min = std::max(rep.c2_min, c2);
        }
    }
    return rep;
}

namespace {

/// Simpson rule for int_0^t (t-sigma) g(sigma) dsigma on 2k intervals.
double simpson_weighted(double t, int intervals, const std::function<double(double)>& g) {
    const double hstep = t / intervals;
    double sum = 0;
    for (int i = 0; i <= intervals; ++i) {
        const double sigma = i * hstep;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * (t - sigma) * g(sigma);
    }
    return sum * hstep / 3.0;
}

} // namespace

HeisenbergCheck heisenberg_expansion_check(const SpectralDecomposition& dec, const Hamiltonian& h,
                                           const EnergyInterval& interval, const LatticeState& u,
                                           std::span<const double> t_grid) {
    auto [first, last] = mode_range(dec, interval);
    const int m = last - first;
    if (m <= 0) throw std::invalid_argument("heisenberg check: empty window");
    const auto p = dec.eigenvectors.middleCols(first, m);

    // Window coefficients of u and compressed operators in the eigenbasis.
    Eigen::VectorXcd x(u.geometry().total_sites());
    {
        const auto amp = u.amplitudes();
        for (std::size_t i = 0; i < amp.size(); ++i) x[static_cast<Eigen::Index>(i)] = amp[i];
    }
    Eigen::VectorXcd coeff = (p.transpose() * x.real().matrix()).cast<cplx>() +
                             cplx(0, 1) * (p.transpose() * x.imag().matrix()).cast<cplx>();

    auto compress = [&](LatticeState (*op)(const Hamiltonian&, const LatticeState&)) {
        Eigen::MatrixXd out(p.rows(), m);
        LatticeState buf = LatticeState::zero(h.geometry_ptr());
        for (int c = 0; c < m; ++c) {
            auto amp = buf.amplitudes();
            for (Eigen::Index r = 0; r < p.rows(); ++r) amp[static_cast<std::size_t>(r)] = p(r, c);
            LatticeState col = op(h, buf);
            for (Eigen::Index r = 0; r < p.rows(); ++r) out(r, c) = col[r].real();
        }
        return Eigen::MatrixXd(p.transpose() * out);
    };
    const Eigen::MatrixXd q2c = [&] {
        Eigen::MatrixXd wq2 = p;
        const auto n2 = dec.geometry->norm2_table();
        for (Eigen::Index r = 0; r < wq2.rows(); ++r) wq2.row(r) *= 1.0 + n2[static_cast<std::size_t>(r)];
        return Eigen::MatrixXd(p.transpose() * wq2);
    }();
    const Eigen::MatrixXd dilc = compress(&apply_dilation);           // [H,-Q^2], antisymmetric
    const Eigen::MatrixXd dcc = compress(&apply_double_commutator);   // box bracket, exact for the identity

    const Eigen::VectorXd energies = dec.eigenvalues.segment(first, m);
    auto phased = [&](double t) {
        Eigen::VectorXcd xt(m);
        for (int k = 0; k < m; ++k) xt[k] = coeff[k] * std::polar(1.0, -t * energies[k]);
        return xt;
    };
    auto lhs_at = [&](double t) {
        // ||Q phi(t)||^2 evaluated in the site basis from the oracle evolution.
        Eigen::VectorXcd xt = phased(t);
        Eigen::VectorXd yr = p * xt.real().matrix(), yi = p * xt.imag().matrix();
        const auto n2 = dec.geometry->norm2_table();
        double s = 0;
        for (Eigen::Index i = 0; i < yr.size(); ++i)
            s += (1.0 + n2[static_cast<std::size_t>(i)]) * (yr[i] * yr[i] + yi[i] * yi[i]);
        return s;
    };
    auto form = [&](const Eigen::MatrixXd& a, double t) -> cplx {
        Eigen::VectorXcd xt = phased(t);
        Eigen::VectorXd yr = a * xt.real().matrix();
        Eigen::VectorXd yi = a * xt.imag().matrix();
        Eigen::VectorXcd y = yr.cast<cplx>() + cplx(0, 1) * yi.cast<cplx>();
        return xt.dot(y); // conjugate-linear in the first argument
    };

    HeisenbergCheck res;
    res.window_rank = m;
    res.theta_eff = mourre_form_min(dec, h, interval).min_rayleigh;
    const double chi_norm2 = coeff.squaredNorm();
    res.integral_margin = std::numeric_limits<double>::infinity();

    const cplx c_q2 = form(q2c, 0.0);
    const cplx c_dil = form(dilc, 0.0);
    auto g = [&](double sigma) { return form(dcc, sigma).real(); };

    for (double t : t_grid) {
        if (t < 0) throw std::invalid_argument("heisenberg check: negative time");
        double integral = 0;
        if (t > 0) {
            int intervals = std::max(8, 2 * static_cast<int>(std::ceil(t * 16)));
            double prev_val = simpson_weighted(t, intervals, g);
            bool converged = false;
            for (int halving = 0; halving < 8; ++halving) {
                intervals *= 2;
                const double val = simpson_weighted(t, intervals, g);
                if (std::abs(val - prev_val) <= 1e-3 * std::max(std::abs(val), 1e-9)) {
                    integral = val;
                    converged = true;
                    break;
                }
                prev_val = val;
            }
            if (!converged) {
                res.quadrature_converged = false;
                integral = prev_val;
            }
        }
        const cplx rhs = c_q2 - cplx(0, 1) * t * c_dil + integral;
        res.max_im = std::max(res.max_im, std::abs(rhs.imag()));
        res.max_defect = std::max(res.max_defect, std::abs(lhs_at(t) - rhs.real()));
        res.integral_margin =
            std::min(res.integral_margin, integral - 0.5 * res.theta_eff * chi_norm2 * t * t);
    }
    if (!res.quadrature_converged) throw std::runtime_error("heisenberg check: quadrature failed to converge");
    return res;
}

CrossTermSeries cross_term_series(const SpectralDecomposition& dec, const EnergyInterval& window_i,
                                  const EnergyInterval& window_j, const LatticeState& u,
                                  std::span<const double> t_grid) {
    if (std::max(window_i.lo, window_j.lo) <= std::min(window_i.hi, window_j.hi))
        throw std::invalid_argument("cross-term windows must be disjoint");
    LatticeState xi = spectral_projection_apply(dec, window_i, u);
    LatticeState xj = spectral_projection_apply(dec, window_j, u);
    CrossTermSeries out;
    out.norm1_bound = 0.5 * (moment_sum(xi, 1.0) + moment_sum(xj, 1.0));
    for (double t : t_grid) {
        LatticeState pi = apply_weight_q(dense_oracle_propagate(dec, xi, t));
        LatticeState pj = apply_weight_q(dense_oracle_propagate(dec, xj, t));
        const cplx c = inner_product(pi, pj);
        const double ni = pi.norm(), nj = pj.norm();
        const double combined = std::sqrt(std::max(0.0, ni * ni + nj * nj + 2.0 * c.real()));
        out.times.push_back(t);
        out.c_abs.push_back(std::abs(c));
        out.almost_orthog.push_back(combined > 0.5 * std::max(ni, nj));
        if (t == 0) {
            // Two-route consistency at t = 0: direct inner product against the
            // norm expansion of ||Q(chi_I + chi_J)u||^2.
            const double via_norms = 0.5 * (combined * combined - ni * ni - nj * nj);
            out.c0_consistency = std::abs(via_norms - c.real());
        }
    }
    std::size_t hold = 0;
    for (bool b : out.almost_orthog) hold += b ? 1 : 0;
    out.almost_orthog_fraction = out.almost_orthog.empty() ? 0.0 : double(hold) / double(out.almost_orthog.size());
    if (!out.c_abs.empty()) out.max_c_abs = *std::max_element(out.c_abs.begin(), out.c_abs.end());
    return out;
}

std::vector<RageRadiusReport> rage_diagnostics(const MomentSeries& series) {
    if (series.ball_radii.size() < 2)
        throw std::invalid_argument("rage diagnostics require ball probabilities at >= 2 radii");
    std::vector<RageRadiusReport> out;
    for (std::size_t rcol = 0; rcol < series.ball_radii.size(); ++rcol) {
        RageRadiusReport rep;
        rep.radius = series.ball_radii[rcol];
        std::vector<double> p(series.times.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = series.ball[i][rcol];
        rep.sup_ball = *std::max_element(p.begin(), p.end());
        auto time_avg = [&](std::size_t upto) {
            // trapezoid over the recorded grid, from the first sample
            double area = 0;
            for (std::size_t i = 1; i <= upto; ++i)
                area += 0.5 * (p[i] + p[i - 1]) * (series.times[i] - series.times[i - 1]);
            const double span = series.times[upto] - series.times[0];
            return span > 0 ? area / span : p[0];
        };
        rep.time_avg_final = time_avg(p.size() - 1);
        rep.time_avg_half = time_avg((p.size() - 1) / 2);
        const std::size_t tail = std::min<std::size_t>(3, p.size());
        double tp = 0;
        for (std::size_t i = p.size() - tail; i < p.size(); ++i) tp += p[i];
        rep.tail_pointwise = tp / double(tail);
        if (rep.sup_ball >= 0.9 && rep.tail_pointwise >= 0.5)
            rep.label = "pp-like";
        else if (rep.tail_pointwise <= 0.05)
            rep.label = "ac-like";
        else if (rep.time_avg_final <= 0.1)
            rep.label = "continuous-like";
        else
            rep.label = "mixed";
        out.push_back(std::move(rep));
    }
    return out;
}

MomentInequalityReport check_moment_inequalities(const MomentSeries& series) {
    MomentInequalityReport rep;
    std::vector<std::size_t> idx(series.orders.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return series.orders[a] < series.orders[b]; });

    for (std::size_t s = 0; s < series.times.size(); ++s) {
        const double s0 = series.norm0[s] * series.norm0[s];
        // Jensen: S_{r'}/S_0 >= (S_r/S_0)^{r'/r} for 0 < r < r'.
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const double ra = series.orders[idx[a]];
            if (!(ra > 0)) continue;
            const double sa = series.norms[s][idx[a]] * series.norms[s][idx[a]] / s0;
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const double rb = series.orders[idx[b]];
                if (!(rb > ra)) continue;
                const double sb = series.norms[s][idx[b]] * series.norms[s][idx[b]] / s0;
                const double bound = std::pow(sa, rb / ra);
                const double slack = (sb - bound) / std::max(sb, 1e-300);
                ++rep.jensen_checks;
                rep.jensen_worst_slack = std::min(rep.jensen_worst_slack, slack);
                if (slack < -1e-12) ++rep.jensen_violations;
            }
        }
        // Interpolation (log-convexity of r -> S_r): for a < r < b,
        // S_r <= S_a^{(b-r)/(b-a)} S_b^{(r-a)/(b-a)}.
        for (std::size_t k = 0; k + 2 < idx.size(); ++k) {
            const double a = series.orders[idx[k]], r = series.orders[idx[k + 1]], b = series.orders[idx[k + 2]];
            if (!(a < r && r < b)) continue;
            const double sa = series.norms[s][idx[k]] * series.norms[s][idx[k]];
            const double sr = series.norms[s][idx[k + 1]] * series.norms[s][idx[k + 1]];
            const double sb = series.norms[s][idx[k + 2]] * series.norms[s][idx[k + 2]];
            const double bound = std::pow(sa, (b - r) / (b - a)) * std::pow(sb, (r - a) / (b - a));
            const double slack = (bound - sr) / std::max(bound, 1e-300);
            ++rep.interp_checks;
            rep.interp_worst_slack = std::min(rep.interp_worst_slack, slack);
            if (slack < -1e-12) ++rep.interp_violations;
        }
    }
    return rep;
}

} // namespace ballistic
