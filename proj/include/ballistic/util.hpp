#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ballistic {

// Counter-based deterministic randomness (splitmix64 finalizer). Every random
// quantity in the project is a pure function of (seed, counter), so realized
// fields and experiment outputs are bitwise reproducible across runs.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + counter * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0,1) from the top 53 bits of the counter stream.
inline double uniform01_at(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(splitmix64_at(seed, counter) >> 11) * 0x1.0p-53;
}

/// Uniform double in [-half_width, half_width).
inline double uniform_sym_at(std::uint64_t seed, std::uint64_t counter, double half_width) {
    return (2.0 * uniform01_at(seed, counter) - 1.0) * half_width;
}

// FNV-1a 64-bit, used for config hashes and output checksums.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// Parse a double, throwing std::invalid_argument on trailing garbage.
double parse_double(std::string_view s);

} // namespace ballistic
