#pragma once

// Shortest round-trip formatting for doubles (the representation used for
// execution results and numeric JSON output), plus strict parsing back.

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "ipg/errors.hpp"

namespace ipg::detail {

// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("malformed number \"" + s + "\"");
    return v;
}

} // namespace ipg::detail
