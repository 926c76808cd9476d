#include "ballistic/lattice.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "ballistic/util.hpp"

namespace ballistic {

BoxGeometry::BoxGeometry(int dimension, int radius) : d_(dimension), L_(radius) {
    if (dimension < 1 || dimension > 4) throw std::invalid_argument("dimension must be in [1,4]");
    if (radius < 1) throw std::invalid_argument("radius must be >= 1");
    const std::int64_t m = 2 * static_cast<std::int64_t>(L_) + 1;
    n_ = 1;
    for (int j = 0; j < d_; ++j) {
        if (n_ > (1LL << 40) / m) throw std::invalid_argument("box too large");
        n_ *= m;
    }
    strides_.resize(static_cast<std::size_t>(d_));
    std::int64_t s = 1;
    for (int j = d_ - 1; j >= 0; --j) {
        strides_[static_cast<std::size_t>(j)] = s;
        s *= m;
    }
    norm2_.resize(static_cast<std::size_t>(n_));
    std::vector<int> c(static_cast<std::size_t>(d_), -L_);
    for (std::int64_t i = 0; i < n_; ++i) {
        double r2 = 0;
        for (int j = 0; j < d_; ++j) r2 += double(c[static_cast<std::size_t>(j)]) * c[static_cast<std::size_t>(j)];
        norm2_[static_cast<std::size_t>(i)] = r2;
        for (int j = d_ - 1; j >= 0; --j) {
            if (++c[static_cast<std::size_t>(j)] <= L_) break;
            c[static_cast<std::size_t>(j)] = -L_;
        }
    }
}

std::optional<std::int64_t> BoxGeometry::index_of(std::span<const int> site) const {
    if (static_cast<int>(site.size()) != d_) throw std::invalid_argument("site arity mismatch");
    std::int64_t idx = 0;
    for (int j = 0; j < d_; ++j) {
        const int nj = site[static_cast<std::size_t>(j)];
        if (nj < -L_ || nj > L_) return std::nullopt;
        idx += (static_cast<std::int64_t>(nj) + L_) * strides_[static_cast<std::size_t>(j)];
    }
    return idx;
}

std::vector<int> BoxGeometry::site_of(std::int64_t index) const {
    if (index < 0 || index >= n_) throw std::out_of_range("site index out of range");
    std::vector<int> site(static_cast<std::size_t>(d_));
    const std::int64_t m = extent();
    for (int j = 0; j < d_; ++j) {
        site[static_cast<std::size_t>(j)] = static_cast<int>((index / strides_[static_cast<std::size_t>(j)]) % m) - L_;
    }
    return site;
}

GeometryPtr make_geometry(int dimension, int radius) {
    return std::make_shared<const BoxGeometry>(dimension, radius);
}

LatticeState::LatticeState(GeometryPtr geometry)
    : geom_(std::move(geometry)), amp_(static_cast<std::size_t>(geom_->total_sites())) {}

LatticeState::LatticeState(GeometryPtr geometry, std::vector<cplx> amplitudes)
    : geom_(std::move(geometry)), amp_(std::move(amplitudes)) {
    if (static_cast<std::int64_t>(amp_.size()) != geom_->total_sites())
        throw std::invalid_argument("amplitude length does not match geometry");
}

double LatticeState::norm() const {
    double s = 0;
    for (const cplx& a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void LatticeState::scale(cplx factor) {
    for (cplx& a : amp_) a *= factor;
}

void LatticeState::normalize() {
    const double n = norm();
    if (n == 0) throw std::domain_error("cannot normalize the zero state");
    scale(1.0 / n);
}

LatticeState LatticeState::zero(GeometryPtr geometry) { return LatticeState(std::move(geometry)); }

LatticeState LatticeState::delta(GeometryPtr geometry, std::span<const int> site) {
    LatticeState s(std::move(geometry));
    auto idx = s.geometry().index_of(site);
    if (!idx) throw std::invalid_argument("delta site outside the box");
    s[*idx] = 1.0;
    return s;
}

LatticeState LatticeState::gaussian(GeometryPtr geometry, std::span<const int> center, double width,
                                    std::span<const double> momentum) {
    const BoxGeometry& g = *geometry;
    if (static_cast<int>(center.size()) != g.dimension()) throw std::invalid_argument("center arity mismatch");
    if (!momentum.empty() && static_cast<int>(momentum.size()) != g.dimension())
        throw std::invalid_argument("momentum arity mismatch");
    if (!(width > 0)) throw std::invalid_argument("gaussian width must be positive");
    LatticeState s(std::move(geometry));
    const std::int64_t n = g.total_sites();
    for (std::int64_t i = 0; i < n; ++i) {
        const auto site = g.site_of(i);
        double q2 = 0, phase = 0;
        for (int j = 0; j < g.dimension(); ++j) {
            const double dx = site[static_cast<std::size_t>(j)] - center[static_cast<std::size_t>(j)];
            q2 += dx * dx;
            if (!momentum.empty()) phase += momentum[static_cast<std::size_t>(j)] * site[static_cast<std::size_t>(j)];
        }
        s[i] = std::polar(std::exp(-q2 / (4.0 * width * width)), phase);
    }
    s.normalize();
    return s;
}

LatticeState LatticeState::random_normalized(GeometryPtr geometry, std::uint64_t seed) {
    LatticeState s(std::move(geometry));
    const std::int64_t n = s.geometry().total_sites();
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t c = static_cast<std::uint64_t>(i);
        s[i] = cplx(2.0 * uniform01_at(seed, 2 * c) - 1.0, 2.0 * uniform01_at(seed, 2 * c + 1) - 1.0);
    }
    s.normalize();
    return s;
}

namespace {
struct WeightKey {
    int d;
    int L;
    double r;
    bool operator<(const WeightKey& o) const {
        if (d != o.d) return d < o.d;
        if (L != o.L) return L < o.L;
        return r < o.r;
    }
};
} // namespace

const std::vector<double>& weight_table(const BoxGeometry& geometry, double r) {
    static std::mutex mu;
    static std::map<WeightKey, std::unique_ptr<std::vector<double>>> cache;
    if (!(r >= 0)) throw std::invalid_argument("moment order r must be >= 0");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[WeightKey{geometry.dimension(), geometry.radius(), r}];
    if (!slot) {
        auto w = std::make_unique<std::vector<double>>(static_cast<std::size_t>(geometry.total_sites()));
        const auto n2 = geometry.norm2_table();
        for (std::size_t i = 0; i < w->size(); ++i) (*w)[i] = std::pow(1.0 + n2[i], r);
        slot = std::move(w);
    }
    return *slot;
}

double moment_sum(const LatticeState& state, double r) {
    const auto& w = weight_table(state.geometry(), r);
    const auto amp = state.amplitudes();
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double p = std::norm(amp[i]);
        if (!std::isfinite(p)) throw std::domain_error("non-finite amplitude in weighted norm");
        s += w[i] * p;
    }
    return s;
}

double weighted_norm(const LatticeState& state, double r) { return std::sqrt(moment_sum(state, r)); }

double ball_probability(const LatticeState& state, int ball_radius) {
    if (ball_radius < 0) throw std::invalid_argument("ball radius must be >= 0");
    const auto n2 = state.geometry().norm2_table();
    const auto amp = state.amplitudes();
    const double r2 = double(ball_radius) * ball_radius;
    double s = 0;
    for (std::size_t i = 0; i < amp.size(); ++i)
        if (n2[i] <= r2) s += std::norm(amp[i]);
    return s;
}

double second_moment(const LatticeState& state) {
    const auto n2 = state.geometry().norm2_table();
    const auto amp = state.amplitudes();
    double s = 0;
    for (std::size_t i = 0; i < amp.size(); ++i) s += n2[i] * std::norm(amp[i]);
    return s;
}

cplx inner_product(const LatticeState& a, const LatticeState& b) {
    if (!(a.geometry() == b.geometry())) throw std::invalid_argument("geometry mismatch in inner product");
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    cplx s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double inner_product_real(const LatticeState& a, const LatticeState& b) { return inner_product(a, b).real(); }

} // namespace ballistic
