#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ballistic {

using cplx = std::complex<double>;

/// Truncated box Λ_L = {-L,...,L}^d with a fixed lexicographic site<->index
/// bijection (first coordinate most significant). Immutable after
/// construction; safe to share across threads.
class BoxGeometry {
public:
    BoxGeometry(int dimension, int radius);

    int dimension() const { return d_; }
    int radius() const { return L_; }
    int extent() const { return 2 * L_ + 1; }
    std::int64_t total_sites() const { return n_; }

    /// Lexicographic index of a site, or nullopt when the site lies outside
    /// the box. Outside is a value, not an error: neighbor queries are allowed
    /// to step over the edge.
    std::optional<std::int64_t> index_of(std::span<const int> site) const;
    std::vector<int> site_of(std::int64_t index) const;

    /// Stride of axis j in the lexicographic ordering.
    std::int64_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    /// |n|^2 of the site at the given index (Euclidean norm squared, exact).
    double site_norm2(std::int64_t index) const { return norm2_[static_cast<std::size_t>(index)]; }
    std::span<const double> norm2_table() const { return norm2_; }

    bool operator==(const BoxGeometry& o) const { return d_ == o.d_ && L_ == o.L_; }

private:
    int d_;
    int L_;
    std::int64_t n_;
    std::vector<std::int64_t> strides_;
    std::vector<double> norm2_;
};

using GeometryPtr = std::shared_ptr<const BoxGeometry>;

GeometryPtr make_geometry(int dimension, int radius);

/// Complex amplitude vector over a box; the psi of the evolution.
class LatticeState {
public:
    explicit LatticeState(GeometryPtr geometry);
    LatticeState(GeometryPtr geometry, std::vector<cplx> amplitudes);

    const BoxGeometry& geometry() const { return *geom_; }
    const GeometryPtr& geometry_ptr() const { return geom_; }

    std::span<cplx> amplitudes() { return amp_; }
    std::span<const cplx> amplitudes() const { return amp_; }
    cplx& operator[](std::int64_t i) { return amp_[static_cast<std::size_t>(i)]; }
    const cplx& operator[](std::int64_t i) const { return amp_[static_cast<std::size_t>(i)]; }

    double norm() const;
    void scale(cplx factor);
    void normalize();

    static LatticeState zero(GeometryPtr geometry);
    static LatticeState delta(GeometryPtr geometry, std::span<const int> site);
    /// Normalized Gaussian profile exp(-|n-center|^2 / (4 width^2)) with an
    /// optional plane-wave factor exp(i k.n). momentum = pi/2 per axis places
    /// the state at the band center of -Delta.
    static LatticeState gaussian(GeometryPtr geometry, std::span<const int> center, double width,
                                 std::span<const double> momentum = {});
    /// Normalized state with counter-rng complex entries; deterministic in seed.
    static LatticeState random_normalized(GeometryPtr geometry, std::uint64_t seed);

private:
    GeometryPtr geom_;
    std::vector<cplx> amp_;
};

/// Cached weight table (1+|n|^2)^r for a (geometry, r) pair. The returned
/// reference stays valid for the program lifetime.
const std::vector<double>& weight_table(const BoxGeometry& geometry, double r);

/// (sum_n (1+|n|^2)^r |psi_n|^2)^{1/2}. Throws std::domain_error on
/// non-finite amplitudes. r = 0 is the plain l2 norm.
double weighted_norm(const LatticeState& state, double r);

/// sum_n (1+|n|^2)^r |psi_n|^2 (the squared weighted norm, no sqrt).
double moment_sum(const LatticeState& state, double r);

/// sum_{|n| <= N} |psi_n|^2.
double ball_probability(const LatticeState& state, int ball_radius);

/// sum_n |n|^2 |psi_n|^2, the bare second moment.
double second_moment(const LatticeState& state);

double inner_product_real(const LatticeState& a, const LatticeState& b);
cplx inner_product(const LatticeState& a, const LatticeState& b);

} // namespace ballistic
