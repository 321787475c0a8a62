// format.hpp: Fixed-precision number rendering used by every text output

#pragma once

#include <cstdio>
#include <optional>
#include <string>

namespace optocool {

// 17 significant digits round-trips any double exactly.
inline std::string fmt17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

// Empty field for missing values (CSV sentinel).
inline std::string fmt17(const std::optional<double>& value) {
    return value ? fmt17(*value) : std::string{};
}

}  // namespace optocool
