#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace gridsens {

/// Shortest decimal string that round-trips to the same double
/// (17 significant digits at most). Keeps file outputs byte-deterministic.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Strict double parse of a whole token; returns false on trailing garbage.
inline bool parse_double(std::string_view token, double& out) {
    auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

}  // namespace gridsens
