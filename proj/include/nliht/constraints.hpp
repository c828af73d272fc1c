#pragma once

// Projections onto non-convex unions of subspaces: k-sparse vectors,
// block-sparse vectors and explicit finite unions of subspaces.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "nliht/types.hpp"

namespace nliht {

/// Squared-distance slack of an approximate projector. The built-in sets all
/// project exactly, so their slack is always zero.
struct ProjectionSlack {
    double epsilon = 0.0;

    explicit ProjectionSlack(double eps = 0.0) : epsilon(eps) {
        if (!(eps >= 0.0)) throw InvalidInput("ProjectionSlack: epsilon must be >= 0");
    }
};

struct KSparse {
    Index n;
    Index k;
};

struct BlockSparse {
    Index n;
    std::vector<std::vector<Index>> blocks;
    Index k_blocks;
};

struct UnionOfSubspaces {
    /// Each basis is n x d_i with orthonormal columns.
    std::vector<Matrix> bases;
};

class ConstraintSet {
public:
    using Variant = std::variant<KSparse, BlockSparse, UnionOfSubspaces>;

    static ConstraintSet k_sparse(Index n, Index k) {
        if (n < 1) throw InvalidInput("KSparse: n must be >= 1");
        if (k < 1 || k > n) throw InvalidInput("KSparse: require 1 <= k <= n");
        return ConstraintSet(KSparse{n, k});
    }

    static ConstraintSet block_sparse(Index n, std::vector<std::vector<Index>> blocks, Index k_blocks) {
        if (n < 1) throw InvalidInput("BlockSparse: n must be >= 1");
        if (blocks.empty()) throw InvalidInput("BlockSparse: no blocks");
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        for (const auto& b : blocks) {
            if (b.empty()) throw InvalidInput("BlockSparse: empty block");
            for (Index i : b) {
                if (i < 0 || i >= n) throw InvalidInput("BlockSparse: index out of range");
                if (seen[static_cast<std::size_t>(i)]++) throw InvalidInput("BlockSparse: blocks overlap");
            }
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
            throw InvalidInput("BlockSparse: blocks do not cover every index");
        }
        if (k_blocks < 1 || k_blocks > static_cast<Index>(blocks.size())) {
            throw InvalidInput("BlockSparse: require 1 <= k_blocks <= number of blocks");
        }
        return ConstraintSet(BlockSparse{n, std::move(blocks), k_blocks});
    }

    /// Contiguous blocks of equal size; n must be divisible by block_size.
    static ConstraintSet uniform_blocks(Index n, Index block_size, Index k_blocks) {
        if (block_size < 1 || n % block_size != 0) {
            throw InvalidInput("BlockSparse: block size must divide n");
        }
        std::vector<std::vector<Index>> blocks;
        for (Index start = 0; start < n; start += block_size) {
            std::vector<Index> b(static_cast<std::size_t>(block_size));
            std::iota(b.begin(), b.end(), start);
            blocks.push_back(std::move(b));
        }
        return block_sparse(n, std::move(blocks), k_blocks);
    }

    static ConstraintSet union_of_subspaces(std::vector<Matrix> bases) {
        if (bases.empty()) throw InvalidInput("UnionOfSubspaces: empty basis list");
        const Index n = bases.front().rows();
        if (n < 1) throw InvalidInput("UnionOfSubspaces: zero-dimensional ambient space");
        for (const auto& b : bases) {
            if (b.rows() != n) throw InvalidInput("UnionOfSubspaces: bases live in different spaces");
            if (b.cols() < 1 || b.cols() > n) throw InvalidInput("UnionOfSubspaces: bad subspace dimension");
            if (!b.allFinite()) throw InvalidInput("UnionOfSubspaces: non-finite basis");
            const Matrix gram = b.transpose() * b;
            const Matrix eye = Matrix::Identity(b.cols(), b.cols());
            if ((gram - eye).cwiseAbs().maxCoeff() > 1e-10) {
                throw InvalidInput("UnionOfSubspaces: basis columns are not orthonormal");
            }
        }
        return ConstraintSet(UnionOfSubspaces{std::move(bases)});
    }

    const Variant& variant() const noexcept { return set_; }

    Index dimension() const {
        return std::visit(
            [](const auto& s) -> Index {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, UnionOfSubspaces>) {
                    return s.bases.front().rows();
                } else {
                    return s.n;
                }
            },
            set_);
    }

    ProjectionSlack slack() const noexcept { return ProjectionSlack{}; }

    std::string describe() const {
        return std::visit(
            [](const auto& s) -> std::string {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, KSparse>) {
                    return "ksparse(n=" + std::to_string(s.n) + ",k=" + std::to_string(s.k) + ")";
                } else if constexpr (std::is_same_v<T, BlockSparse>) {
                    return "block(n=" + std::to_string(s.n) + ",blocks=" + std::to_string(s.blocks.size()) +
                           ",k=" + std::to_string(s.k_blocks) + ")";
                } else {
                    return "union(n=" + std::to_string(s.bases.front().rows()) +
                           ",subspaces=" + std::to_string(s.bases.size()) + ")";
                }
            },
            set_);
    }

private:
    explicit ConstraintSet(Variant v) : set_(std::move(v)) {}
    Variant set_;
};

/// Projected point together with the selected active set: coordinate indices
/// (KSparse), block indices (BlockSparse) or a single subspace index (union).
struct Projection {
    Vector value;
    std::vector<Index> active;
};

namespace detail {

/// Indices of the `count` largest scores; ties keep the lower index.
inline std::vector<Index> top_indices(const std::vector<double>& score, Index count) {
    std::vector<Index> order(score.size());
    std::iota(order.begin(), order.end(), Index{0});
    const auto before = [&](Index a, Index b) {
        const double sa = score[static_cast<std::size_t>(a)];
        const double sb = score[static_cast<std::size_t>(b)];
        return sa > sb || (sa == sb && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + count, order.end(), before);
    order.resize(static_cast<std::size_t>(count));
    std::sort(order.begin(), order.end());
    return order;
}

inline Projection project_k_sparse(const Vector& x, const KSparse& s) {
    std::vector<double> mag(static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(x[i]);
    Projection p{Vector::Zero(x.size()), top_indices(mag, s.k)};
    for (Index i : p.active) p.value[i] = x[i];
    return p;
}

inline Projection project_block_sparse(const Vector& x, const BlockSparse& s) {
    std::vector<double> energy;
    energy.reserve(s.blocks.size());
    for (const auto& b : s.blocks) {
        double e = 0.0;
        for (Index i : b) e += x[i] * x[i];
        energy.push_back(std::sqrt(e));
    }
    Projection p{Vector::Zero(x.size()), top_indices(energy, s.k_blocks)};
    for (Index bi : p.active) {
        for (Index i : s.blocks[static_cast<std::size_t>(bi)]) p.value[i] = x[i];
    }
    return p;
}

inline Projection project_union(const Vector& x, const UnionOfSubspaces& s) {
    Index best = -1;
    double best_res = 0.0;
    Vector best_value;
    for (std::size_t i = 0; i < s.bases.size(); ++i) {
        const Matrix& b = s.bases[i];
        Vector proj = b * (b.transpose() * x);
        const double res = (x - proj).norm();
        if (best < 0 || res < best_res) {
            best = static_cast<Index>(i);
            best_res = res;
            best_value = std::move(proj);
        }
    }
    return Projection{std::move(best_value), {best}};
}

}  // namespace detail

inline Projection project_with_active(const Vector& x, const ConstraintSet& set) {
    require_size(x, set.dimension(), "project");
    require_finite(x, "project");
    return std::visit(
        [&](const auto& s) -> Projection {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, KSparse>) {
                return detail::project_k_sparse(x, s);
            } else if constexpr (std::is_same_v<T, BlockSparse>) {
                return detail::project_block_sparse(x, s);
            } else {
                return detail::project_union(x, s);
            }
        },
        set.variant());
}

/// Exact nearest point of `set` to `x`. Deterministic: magnitude and energy
/// ties keep the lower index, residual ties keep the lower subspace.
inline Vector project(const Vector& x, const ConstraintSet& set) { return project_with_active(x, set).value; }

inline Vector project_union(const Vector& x, const std::vector<Matrix>& bases) {
    return project(x, ConstraintSet::union_of_subspaces(bases));
}

inline double distance_to_set(const Vector& x, const ConstraintSet& set) { return (x - project(x, set)).norm(); }

/// Random member of the set: uniform support / block choice / subspace index
/// with standard Gaussian coefficients.
template <class Rng>
Vector sample_member(const ConstraintSet& set, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto pick = [&](Index population, Index count) {
        std::vector<Index> all(static_cast<std::size_t>(population));
        std::iota(all.begin(), all.end(), Index{0});
        // Partial Fisher-Yates keeps the draw count independent of the values.
        for (Index i = 0; i < count; ++i) {
            std::uniform_int_distribution<Index> d(i, population - 1);
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(d(rng))]);
        }
        all.resize(static_cast<std::size_t>(count));
        return all;
    };
    return std::visit(
        [&](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, KSparse>) {
                Vector v = Vector::Zero(s.n);
                for (Index i : pick(s.n, s.k)) v[i] = gauss(rng);
                return v;
            } else if constexpr (std::is_same_v<T, BlockSparse>) {
                Vector v = Vector::Zero(s.n);
                for (Index bi : pick(static_cast<Index>(s.blocks.size()), s.k_blocks)) {
                    for (Index i : s.blocks[static_cast<std::size_t>(bi)]) v[i] = gauss(rng);
                }
                return v;
            } else {
                std::uniform_int_distribution<std::size_t> which(0, s.bases.size() - 1);
                const Matrix& b = s.bases[which(rng)];
                Vector c(b.cols());
                for (Index j = 0; j < c.size(); ++j) c[j] = gauss(rng);
                return b * c;
            }
        },
        set.variant());
}

/// Sum of `terms` independent random members, i.e. a point of A + ... + A.
template <class Rng>
Vector sample_sum_member(const ConstraintSet& set, Rng& rng, int terms) {
    Vector v = Vector::Zero(set.dimension());
    for (int t = 0; t < terms; ++t) v += sample_member(set, rng);
    return v;
}

/// Orthonormal basis of A_i + A_j for a random pair of pieces of the set.
template <class Rng>
Matrix sample_sum_subspace(const ConstraintSet& set, Rng& rng) {
    const Index n = set.dimension();
    const auto coordinate_basis = [n](std::vector<Index> idx) {
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        Matrix b = Matrix::Zero(n, static_cast<Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) b(idx[j], static_cast<Index>(j)) = 1.0;
        return b;
    };
    return std::visit(
        [&](const auto& s) -> Matrix {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UnionOfSubspaces>) {
                std::uniform_int_distribution<std::size_t> which(0, s.bases.size() - 1);
                const Matrix& bi = s.bases[which(rng)];
                const Matrix& bj = s.bases[which(rng)];
                Matrix stacked(n, bi.cols() + bj.cols());
                stacked << bi, bj;
                Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
                const Index r = qr.rank();
                Matrix q = qr.householderQ() * Matrix::Identity(n, r);
                return q;
            } else {
                std::vector<Index> idx;
                for (int t = 0; t < 2; ++t) {
                    const Vector v = sample_member(set, rng);
                    // Supports of a Gaussian draw are exactly the chosen indices.
                    for (Index i = 0; i < n; ++i) {
                        if (v[i] != 0.0) idx.push_back(i);
                    }
                }
                return coordinate_basis(std::move(idx));
            }
        },
        set.variant());
}

}  // namespace nliht
