#include "ballistic/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ballistic/util.hpp"

namespace ballistic {

PotentialField::PotentialField(GeometryPtr geometry, std::vector<double> values)
    : geom_(std::move(geometry)), v_(std::move(values)) {
    if (static_cast<std::int64_t>(v_.size()) != geom_->total_sites())
        throw std::invalid_argument("potential length does not match geometry");
    sup_ = 0;
    for (double x : v_) {
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite potential value");
        sup_ = std::max(sup_, std::abs(x));
    }
}

std::string family_name(const PotentialSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroPotential>) return "zero";
            else if constexpr (std::is_same_v<T, PowerLawPotential>) return "power_law";
            else if constexpr (std::is_same_v<T, WignerVonNeumannPotential>) return "wigner_von_neumann";
            else if constexpr (std::is_same_v<T, AndersonPotential>) return "anderson";
            else return "periodic";
        },
        spec);
}

PotentialField realize(const PotentialSpec& spec, GeometryPtr geometry) {
    const BoxGeometry& g = *geometry;
    const std::int64_t n = g.total_sites();
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);

    if (std::holds_alternative<ZeroPotential>(spec)) {
        return PotentialField(std::move(geometry), std::move(v));
    }
    if (const auto* p = std::get_if<PowerLawPotential>(&spec)) {
        if (!(std::isfinite(p->c) && std::isfinite(p->alpha)) || !(p->alpha > 0))
            throw std::invalid_argument("power_law requires finite c and alpha > 0");
        for (std::int64_t i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] = p->c * std::pow(1.0 + std::sqrt(g.site_norm2(i)), -p->alpha);
        return PotentialField(std::move(geometry), std::move(v));
    }
    if (const auto* p = std::get_if<WignerVonNeumannPotential>(&spec)) {
        if (g.dimension() != 1) throw std::invalid_argument("wigner_von_neumann requires d = 1");
        if (!(std::isfinite(p->c) && std::isfinite(p->k)))
            throw std::invalid_argument("wigner_von_neumann requires finite parameters");
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = double(static_cast<int>(i) - g.radius());
            v[static_cast<std::size_t>(i)] = p->c * std::sin(2.0 * p->k * x) / std::max(1.0, std::abs(x));
        }
        return PotentialField(std::move(geometry), std::move(v));
    }
    if (const auto* p = std::get_if<AndersonPotential>(&spec)) {
        if (!(std::isfinite(p->lambda)) || p->lambda < 0)
            throw std::invalid_argument("anderson requires lambda >= 0");
        for (std::int64_t i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] = uniform_sym_at(p->seed, static_cast<std::uint64_t>(i), p->lambda / 2.0);
        return PotentialField(std::move(geometry), std::move(v));
    }
    const auto& p = std::get<PeriodicPotential>(spec);
    if (p.pattern.empty()) throw std::invalid_argument("periodic pattern must be non-empty");
    const auto m = static_cast<std::int64_t>(p.pattern.size());
    for (std::int64_t i = 0; i < n; ++i) {
        const auto site = g.site_of(i);
        const std::int64_t a = std::abs(static_cast<std::int64_t>(site[0]));
        v[static_cast<std::size_t>(i)] = p.pattern[static_cast<std::size_t>(a % m)];
    }
    return PotentialField(std::move(geometry), std::move(v));
}

std::vector<DecayProfilePoint> decay_profile(const PotentialField& field) {
    const BoxGeometry& g = field.geometry();
    const std::int64_t n = g.total_sites();
    // Sort sites by |n| descending, then sweep a running sup of |n||V_n| so
    // each threshold R reads off sup over the tail {|n| >= R}.
    std::vector<std::pair<double, double>> tail; // (|n|, |n||V_n|)
    tail.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double r = std::sqrt(g.site_norm2(i));
        tail.emplace_back(r, r * std::abs(field[i]));
    }
    std::sort(tail.begin(), tail.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<int> radii;
    for (int r = 1; r <= g.radius(); r *= 2) radii.push_back(r);
    if (radii.empty() || radii.back() != g.radius()) radii.push_back(g.radius());

    std::vector<DecayProfilePoint> out;
    out.reserve(radii.size());
    std::size_t pos = 0;
    double running = 0;
    // Walk thresholds from the largest radius down so `running` only grows.
    for (auto it = radii.rbegin(); it != radii.rend(); ++it) {
        const double thr = *it;
        while (pos < tail.size() && tail[pos].first >= thr) {
            running = std::max(running, tail[pos].second);
            ++pos;
        }
        out.push_back({*it, running});
    }
    std::reverse(out.begin(), out.end());
    return out;
}

bool satisfies_decay_hypothesis(const std::vector<DecayProfilePoint>& profile) {
    if (profile.size() < 3) return false;
    std::size_t start = 0;
    while (start < profile.size() && profile[start].radius < 4) ++start;
    if (start >= profile.size() - 1) return false;
    for (std::size_t i = start; i + 1 < profile.size(); ++i)
        if (profile[i + 1].value > profile[i].value + 1e-15) return false;
    return profile.back().value <= 0.25 * profile[start].value + 1e-15;
}

} // namespace ballistic
