#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace mpbell {

// 10 significant digits, the fixed format for probability-like values in
// reports.
inline std::string format_sig10(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// Scientific notation, the fixed format for loss-rate thresholds.
inline std::string format_sci(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

inline double round_sig10(double x) { return std::strtod(format_sig10(x).c_str(), nullptr); }
inline double round_sci(double x) { return std::strtod(format_sci(x).c_str(), nullptr); }

}  // namespace mpbell
