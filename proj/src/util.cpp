#include "ballistic/util.hpp"

#include <array>
#include <cstdio>

namespace ballistic {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s) {
    // Trim surrounding whitespace; std::from_chars does not skip it.
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string_view::npos) throw std::invalid_argument("empty numeric value");
    s = s.substr(b, e - b + 1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad numeric value: '" + std::string(s) + "'");
    return v;
}

} // namespace ballistic
