#pragma once

#include <charconv>
#include <string>

namespace pnsim {

/// Shortest round-trip decimal form, independent of the global locale.
inline std::string csv_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace pnsim
