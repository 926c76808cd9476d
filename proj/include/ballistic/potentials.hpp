#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ballistic/lattice.hpp"

namespace ballistic {

/// Real diagonal potential realized on a box.
class PotentialField {
public:
    PotentialField(GeometryPtr geometry, std::vector<double> values);

    const BoxGeometry& geometry() const { return *geom_; }
    const GeometryPtr& geometry_ptr() const { return geom_; }
    std::span<const double> values() const { return v_; }
    double operator[](std::int64_t i) const { return v_[static_cast<std::size_t>(i)]; }
    double sup_norm() const { return sup_; }

private:
    GeometryPtr geom_;
    std::vector<double> v_;
    double sup_;
};

struct ZeroPotential {};
struct PowerLawPotential {
    double c;
    double alpha; // V_n = c (1+|n|)^{-alpha}
};
struct WignerVonNeumannPotential {
    double c;
    double k; // V_n = c sin(2 k n) / max(1,|n|), d = 1 only
};
struct AndersonPotential {
    double lambda; // iid uniform on [-lambda/2, lambda/2]
    std::uint64_t seed;
};
struct PeriodicPotential {
    std::vector<double> pattern; // V_n = pattern[|n_1| mod len]
};

using PotentialSpec =
    std::variant<ZeroPotential, PowerLawPotential, WignerVonNeumannPotential, AndersonPotential, PeriodicPotential>;

std::string family_name(const PotentialSpec& spec);

/// Deterministic realization of a spec on a geometry. Anderson draws from the
/// splitmix64 counter stream indexed by the lexicographic site index.
PotentialField realize(const PotentialSpec& spec, GeometryPtr geometry);

struct DecayProfilePoint {
    int radius;   // R
    double value; // sup_{|n| >= R} |n| |V_n|
};

/// Decay diagnostic for the |n| V_n -> 0 hypothesis, sampled at
/// R in {1, 2, 4, ..., L}. Empty-tail radii report 0.
std::vector<DecayProfilePoint> decay_profile(const PotentialField& field);

/// Desk-scale label: profile decreasing beyond R = 4 and the final value at
/// most a quarter of the value at R = 4 (or at the first recorded radius).
bool satisfies_decay_hypothesis(const std::vector<DecayProfilePoint>& profile);

} // namespace ballistic
