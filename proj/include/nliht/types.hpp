#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "nliht/errors.hpp"

namespace nliht {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

inline void require_size(const Vector& v, Index n, const char* what) {
    if (v.size() != n) {
        throw InvalidInput(std::string(what) + ": expected length " + std::to_string(n) +
                           ", got " + std::to_string(v.size()));
    }
}

/// splitmix64 finalizer; used to derive independent seeds from (base, i, j).
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

}  // namespace nliht
