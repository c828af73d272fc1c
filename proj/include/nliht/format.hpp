#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nliht {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Shortest-ish locale-independent rendering; 15 significant digits.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string fmt_vector(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt_double(v[i]);
    }
    return out;
}

inline void write_key_values(std::ostream& os, const KeyValues& kv) {
    for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
}

}  // namespace nliht
