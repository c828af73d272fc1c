#pragma once

// Empirical constants (RIP of the Jacobian, linearisation constant, RSCP) and
// the recovery bounds built from them.
//
// Where a bound's stated form and the inequality chain that produces it
// disagree, both are evaluated: Variant::AsPrinted is the literal formula,
// Variant::DerivationConsistent is what the chain actually yields.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nliht/constraints.hpp"
#include "nliht/format.hpp"
#include "nliht/operators.hpp"
#include "nliht/solvers.hpp"

namespace nliht {

enum class Variant { AsPrinted, DerivationConsistent };

inline std::string to_string(Variant v) { return v == Variant::AsPrinted ? "printed" : "derived"; }

// ---------------------------------------------------------------------------
// Restricted isometry of the Jacobian

struct RipSample {
    Vector x1;
    Vector x2;
    Vector point;  // linearisation point x*
};

/// Draws x1, x2, x* from the set; x2 is redrawn while x1 == x2.
template <class Rng>
RipSample draw_rip_sample(const ConstraintSet& set, Rng& rng) {
    RipSample s;
    s.x1 = sample_member(set, rng);
    do {
        s.x2 = sample_member(set, rng);
    } while ((s.x1 - s.x2).squaredNorm() == 0.0);
    s.point = sample_member(set, rng);
    return s;
}

/// ||Phi_{x*}(x1 - x2)||^2 / ||x1 - x2||^2.
inline double rip_quotient(const MeasurementModel& model, const RipSample& s) {
    const Vector d = s.x1 - s.x2;
    const double den = d.squaredNorm();
    if (den == 0.0) throw InvalidInput("rip_quotient: x1 == x2");
    return jacobian_apply(model, s.point, d).squaredNorm() / den;
}

/// Monte-Carlo extremes of the RIP quotient. Sampling can only see quotients
/// inside the true range, so alpha_hat >= alpha and beta_hat <= beta.
struct RipEstimate {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    std::size_t trials = 0;
    std::string constraint;
    std::size_t linearization_points_sampled = 0;
    bool inner_estimate = true;
};

inline RipEstimate estimate_rip(const MeasurementModel& model, const ConstraintSet& set, std::size_t trials,
                                std::uint64_t seed) {
    if (trials < 1) throw InvalidInput("estimate_rip: trials must be >= 1");
    if (set.dimension() != model.cols()) throw InvalidInput("estimate_rip: constraint dimension differs from model");
    std::mt19937_64 rng(seed);
    RipEstimate est;
    est.alpha_hat = std::numeric_limits<double>::infinity();
    est.beta_hat = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const double q = rip_quotient(model, draw_rip_sample(set, rng));
        est.alpha_hat = std::min(est.alpha_hat, q);
        est.beta_hat = std::max(est.beta_hat, q);
    }
    est.trials = trials;
    est.constraint = set.describe();
    est.linearization_points_sampled = model.is_linear() ? 0 : trials;
    return est;
}

/// Exact restricted extremal squared singular values over every support of
/// size `order` (capped at n). Feasible when C(n, order) <= 1e4.
struct ExactRip {
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t supports = 0;
};

inline double binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

/// Calls fn(support) for every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_support(Index n, Index k, Fn&& fn) {
    std::vector<Index> s(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(static_cast<const std::vector<Index>&>(s));
        Index i = k - 1;
        while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++s[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
    }
}

inline ExactRip exact_rip_linear(const Matrix& phi, Index order) {
    const Index n = phi.cols();
    const Index s = std::min(order, n);
    if (s < 1) throw InvalidInput("exact_rip_linear: order must be >= 1");
    if (binomial(n, s) > 1e4) throw InvalidInput("exact_rip_linear: too many supports to enumerate");
    ExactRip out;
    out.alpha = std::numeric_limits<double>::infinity();
    for_each_support(n, s, [&](const std::vector<Index>& support) {
        Matrix sub(phi.rows(), s);
        for (Index j = 0; j < s; ++j) sub.col(j) = phi.col(support[static_cast<std::size_t>(j)]);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sub.transpose() * sub, Eigen::EigenvaluesOnly);
        out.alpha = std::min(out.alpha, eig.eigenvalues()(0));
        out.beta = std::max(out.beta, eig.eigenvalues()(s - 1));
        ++out.supports;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Linearisation constant

inline double lemma2_constant(double beta, double derivative_bound) { return beta * derivative_bound; }

struct CEstimate {
    double empirical = 0.0;
    /// beta * M_h with beta taken as the full operator norm squared of the
    /// matrix; zero for linear models.
    double analytic = 0.0;
    double beta_used = 0.0;
    std::size_t trials = 0;
};

/// ||Phi(x1) - Phi(x2) - Phi_{x1}(x1 - x2)||^2 / ||x1 - x2||^2.
inline double linearization_ratio(const MeasurementModel& model, const Vector& x1, const Vector& x2) {
    const double den = (x1 - x2).squaredNorm();
    if (den == 0.0) throw InvalidInput("linearization_ratio: x1 == x2");
    const double r = linearization_residual(model, x1, x2);
    return r * r / den;
}

inline CEstimate estimate_C(const MeasurementModel& model, const ConstraintSet& set, std::size_t trials,
                            std::uint64_t seed) {
    if (trials < 1) throw InvalidInput("estimate_C: trials must be >= 1");
    if (set.dimension() != model.cols()) throw InvalidInput("estimate_C: constraint dimension differs from model");
    CEstimate out;
    out.trials = trials;
    if (model.is_linear()) return out;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        const Vector x1 = sample_member(set, rng);
        Vector x2;
        do {
            x2 = sample_member(set, rng);
        } while ((x1 - x2).squaredNorm() == 0.0);
        out.empirical = std::max(out.empirical, linearization_ratio(model, x1, x2));
    }
    out.beta_used = operator_norm_squared(model.matrix());
    out.analytic = lemma2_constant(out.beta_used, model.derivative_bound());
    return out;
}

// ---------------------------------------------------------------------------
// RIP constants of Phi_bar (I + H') from those of Phi_bar

struct ConstantPair {
    double lower = 0.0;
    double upper = 0.0;
};

struct Lemma1Constants {
    ConstantPair printed;
    ConstantPair derived;
    bool vacuous = false;  // sqrt(alpha) - sqrt(beta) M <= 0
};

inline Lemma1Constants lemma1_constants(double alpha, double beta, double m) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("lemma1_constants: alpha and beta must be positive");
    if (!(m >= 0.0) || !(m < 1.0)) throw InvalidInput("lemma1_constants: require 0 <= M < 1");
    const double root = std::sqrt(alpha) - std::sqrt(beta) * m;
    Lemma1Constants out;
    out.vacuous = !(root > 0.0);
    // Exact at M = 0 rather than (sqrt(alpha))^2, which can round.
    const double lower = m == 0.0 ? alpha : root * root;
    out.printed = {lower, m == 0.0 ? beta : beta * (1.0 - m) * (1.0 - m)};
    out.derived = {lower, m == 0.0 ? beta : beta * (1.0 + m) * (1.0 + m)};
    return out;
}

// ---------------------------------------------------------------------------
// Iteration-count and error bounds

struct Theorem1Report {
    // inputs
    double alpha = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double x_a_norm = 0.0;
    double dist_x_to_a = 0.0;
    std::size_t k = 0;
    // outputs
    double a = 0.0;
    double b = 0.0;
    double epsilon_k = 0.0;
    std::optional<std::int64_t> k_star;  // nullopt: unbounded or not applicable
    double error_bound = 0.0;
    bool not_applicable = false;         // a outside (0, 1)
    bool k_star_floored = false;         // log argument >= 1
    bool residuals_converged = false;
    std::optional<double> asymptotic_epsilon;  // eps_lim * b / (1 - a)
    std::optional<double> asymptotic_bound;
};

namespace detail {

/// ceil(2 ln(ratio) / ln(factor)), floored at zero. nullopt when ratio == 0.
inline std::optional<std::int64_t> iterations_to_reach(double ratio, double factor, bool& floored) {
    floored = false;
    if (ratio <= 0.0) return std::nullopt;
    const double raw = 2.0 * std::log(ratio) / std::log(factor);
    if (!(raw > 0.0)) {
        floored = true;
        return std::int64_t{0};
    }
    return static_cast<std::int64_t>(std::ceil(raw));
}

}  // namespace detail

/// eps^k = b sum_{n<k} a^{k-1-n} ||e_A^n||^2 with b = 4/alpha, a = 2/(mu alpha) - 2,
/// k* = ceil(2 ln(delta sqrt(eps^k) / ||x_A||) / ln a) and the error bound
/// (1 + delta) sqrt(eps^k) + ||x_A - x||.
inline Theorem1Report theorem1_report(double alpha, double mu, std::span<const double> residual_norms,
                                      double x_a_norm, double delta, double dist_x_to_a) {
    if (residual_norms.empty()) throw InvalidInput("theorem1_report: empty residual sequence");
    if (!(alpha > 0.0) || !(mu > 0.0)) throw InvalidInput("theorem1_report: alpha and mu must be positive");
    if (!(delta > 0.0)) throw InvalidInput("theorem1_report: delta must be positive");
    if (!(x_a_norm >= 0.0) || !(dist_x_to_a >= 0.0)) throw InvalidInput("theorem1_report: norms must be >= 0");

    Theorem1Report r;
    r.alpha = alpha;
    r.mu = mu;
    r.delta = delta;
    r.x_a_norm = x_a_norm;
    r.dist_x_to_a = dist_x_to_a;
    r.k = residual_norms.size();
    r.a = 2.0 / (mu * alpha) - 2.0;
    r.b = 4.0 / alpha;
    r.not_applicable = !(r.a > 0.0 && r.a < 1.0);

    double sum = 0.0;
    for (std::size_t n = 0; n < r.k; ++n) {
        const double e = residual_norms[n];
        if (!(e >= 0.0)) throw InvalidInput("theorem1_report: residual norms must be >= 0");
        sum += std::pow(r.a, static_cast<double>(r.k - 1 - n)) * e * e;
    }
    r.epsilon_k = r.b * sum;
    r.error_bound = (1.0 + delta) * std::sqrt(r.epsilon_k) + dist_x_to_a;

    if (!r.not_applicable) {
        const double ratio = delta * std::sqrt(r.epsilon_k) / x_a_norm;
        r.k_star = detail::iterations_to_reach(ratio, r.a, r.k_star_floored);
    }

    const std::size_t tail = std::max<std::size_t>(1, (r.k + 3) / 4);
    const auto last = residual_norms.subspan(r.k - tail);
    const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
    r.residuals_converged = (*hi == 0.0) || (*lo > 0.0 && *hi / *lo < 1.01);
    if (r.residuals_converged && !r.not_applicable) {
        const double e_lim = residual_norms.back() * residual_norms.back();
        r.asymptotic_epsilon = e_lim * r.b / (1.0 - r.a);
        r.asymptotic_bound = std::sqrt(*r.asymptotic_epsilon) + dist_x_to_a;
    }
    return r;
}

struct Corollary1Variant {
    double constant = 0.0;
    double bound = 0.0;
};

struct Corollary1Report {
    double alpha = 0.0;
    double mu = 0.0;
    double c_lin = 0.0;
    double e_a_norm = 0.0;
    double dist_x_to_a = 0.0;

    /// c = 2 / (0.75 alpha - 1/mu - 2C), evaluated literally.
    Corollary1Variant printed;
    double printed_denominator = 0.0;
    bool negative_constant = false;

    /// c' = sqrt((8/alpha) / (1 - a')), a' = 2 (1/(mu alpha) - 1 + 4C/alpha):
    /// the fixed point of r_{n+1} <= a' r_n + (8/alpha) ||e_A||^2.
    Corollary1Variant derived;
    double contraction = 0.0;  // a'
    bool not_applicable = false;
};

inline Corollary1Report corollary1_report(double alpha, double mu, double c_lin, double e_a_norm,
                                          double dist_x_to_a) {
    if (!(alpha > 0.0) || !(mu > 0.0)) throw InvalidInput("corollary1_report: alpha and mu must be positive");
    if (!(c_lin >= 0.0) || !(e_a_norm >= 0.0) || !(dist_x_to_a >= 0.0)) {
        throw InvalidInput("corollary1_report: C and norms must be >= 0");
    }
    Corollary1Report r;
    r.alpha = alpha;
    r.mu = mu;
    r.c_lin = c_lin;
    r.e_a_norm = e_a_norm;
    r.dist_x_to_a = dist_x_to_a;

    const auto bound_of = [&](double c) { return e_a_norm == 0.0 ? dist_x_to_a : c * e_a_norm + dist_x_to_a; };

    r.printed_denominator = 0.75 * alpha - 1.0 / mu - 2.0 * c_lin;
    r.negative_constant = !(r.printed_denominator > 0.0);
    r.printed.constant = 2.0 / r.printed_denominator;
    r.printed.bound = bound_of(r.printed.constant);

    r.contraction = 2.0 * (1.0 / (mu * alpha) - 1.0 + 4.0 * c_lin / alpha);
    r.not_applicable = !(r.contraction < 1.0);
    if (r.not_applicable) {
        r.derived.constant = std::numeric_limits<double>::quiet_NaN();
        r.derived.bound = e_a_norm == 0.0 ? dist_x_to_a : std::numeric_limits<double>::quiet_NaN();
    } else {
        r.derived.constant = std::sqrt((8.0 / alpha) / (1.0 - r.contraction));
        r.derived.bound = bound_of(r.derived.constant);
    }
    return r;
}

struct Theorem2Report {
    double alpha = 0.0;
    double mu = 0.0;
    double f_opt = 0.0;
    double x_opt_norm = 0.0;
    double delta = 0.0;
    double dist_x_to_opt = 0.0;

    double c = 0.0;  // 4 (1 - mu alpha)
    std::optional<std::int64_t> n_star;
    bool n_star_floored = false;
    bool not_applicable = false;  // c outside (0, 1)

    /// (2 sqrt(mu/(1-c)) + delta) f_opt + ||x - x_opt||
    double printed_bound = 0.0;
    /// 2 sqrt(mu/(1-c)) sqrt(f_opt) + delta f_opt + ||x - x_opt||
    double derived_bound = 0.0;
};

inline Theorem2Report theorem2_report(double alpha, double mu, double f_opt, double x_opt_norm, double delta,
                                      double dist_x_to_opt = 0.0) {
    if (!(f_opt >= 0.0)) throw InvalidInput("theorem2_report: f(x_opt) must be >= 0");
    if (!(alpha > 0.0) || !(mu > 0.0)) throw InvalidInput("theorem2_report: alpha and mu must be positive");
    if (!(delta > 0.0)) throw InvalidInput("theorem2_report: delta must be positive");
    if (!(x_opt_norm >= 0.0) || !(dist_x_to_opt >= 0.0)) throw InvalidInput("theorem2_report: norms must be >= 0");
    Theorem2Report r;
    r.alpha = alpha;
    r.mu = mu;
    r.f_opt = f_opt;
    r.x_opt_norm = x_opt_norm;
    r.delta = delta;
    r.dist_x_to_opt = dist_x_to_opt;
    r.c = pgd_contraction_factor(alpha, mu);
    r.not_applicable = !(r.c > 0.0 && r.c < 1.0);
    if (!r.not_applicable) {
        r.n_star = detail::iterations_to_reach(delta * f_opt / x_opt_norm, r.c, r.n_star_floored);
    }
    if (r.c < 1.0) {
        const double lead = 2.0 * std::sqrt(mu / (1.0 - r.c));
        r.printed_bound = (lead + delta) * f_opt + dist_x_to_opt;
        r.derived_bound = lead * std::sqrt(f_opt) + delta * f_opt + dist_x_to_opt;
    } else {
        r.printed_bound = r.derived_bound = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Restricted strict convexity

/// (f(x1) - f(x2) - <grad f(x2), x1 - x2>) / ||x1 - x2||^2.
inline double rscp_quotient(const Objective& obj, const Vector& x1, const Vector& x2) {
    const Vector d = x1 - x2;
    const double den = d.squaredNorm();
    if (den == 0.0) throw InvalidInput("rscp_quotient: x1 == x2");
    return (obj.evaluate(x1) - obj.evaluate(x2) - obj.gradient(x2).dot(d)) / den;
}

struct RscpEstimate {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    std::size_t trials = 0;
    bool not_rscp = false;  // alpha_hat <= 0
};

/// Pairs with x2 standard Gaussian and x1 - x2 a sum of three random members
/// of the set (a point of A + A + A).
inline RscpEstimate rscp_probe(const Objective& obj, const ConstraintSet& set, std::size_t trials,
                               std::uint64_t seed) {
    if (trials < 1) throw InvalidInput("rscp_probe: trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RscpEstimate out;
    out.alpha_hat = std::numeric_limits<double>::infinity();
    out.beta_hat = -std::numeric_limits<double>::infinity();
    const Index n = set.dimension();
    for (std::size_t t = 0; t < trials; ++t) {
        Vector x2(n);
        for (Index i = 0; i < n; ++i) x2[i] = gauss(rng);
        Vector d;
        do {
            d = sample_sum_member(set, rng, 3);
        } while (d.squaredNorm() == 0.0);
        const double q = rscp_quotient(obj, x2 + d, x2);
        out.alpha_hat = std::min(out.alpha_hat, q);
        out.beta_hat = std::max(out.beta_hat, q);
    }
    out.trials = trials;
    out.not_rscp = !(out.alpha_hat > 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Non-convexity of x -> ||y - Phi(x)||^2 for non-affine Phi

struct ConvexityWitness {
    bool found = false;
    bool budget_exhausted = false;
    std::size_t trials_used = 0;
    double gap = 0.0;  // (f(x1) + f(x2))/2 - f((x1 + x2)/2), negative when found
    Vector y;
    Vector x1;
    Vector x2;
};

/// (f(x1) + f(x2))/2 - f((x1 + x2)/2) for f(x) = ||y - Phi(x)||^2.
inline double midpoint_convexity_gap(const MeasurementModel& model, const Vector& y, const Vector& x1,
                                     const Vector& x2) {
    const auto f = [&](const Vector& x) { return (y - forward(model, x)).squaredNorm(); };
    return 0.5 * f(x1) + 0.5 * f(x2) - f(0.5 * (x1 + x2));
}

/// Searches pairs x1, x2 on random subspaces A_i + A_j and observations y for
/// a midpoint-convexity violation. Each trial tries a Gaussian y and then
/// y = -t (Phi(xbar) - (Phi(x1) + Phi(x2))/2) with t large enough that the
/// expanded gap is negative. A violation must exceed 1e-9 relative to the
/// objective values to count.
inline ConvexityWitness convexity_counterexample(const MeasurementModel& model, const ConstraintSet& set,
                                                 std::uint64_t seed, std::size_t trials = 1000) {
    if (set.dimension() != model.cols()) throw InvalidInput("convexity_counterexample: dimension mismatch");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> coeff(-3.14159265358979323846, 3.14159265358979323846);
    const Nonlinearity h = model.nonlinearity();
    const bool boxed = h.kind() == NonlinearityKind::Cubic;

    const auto draw_point = [&](const Matrix& basis) {
        Vector c(basis.cols());
        for (Index j = 0; j < c.size(); ++j) c[j] = coeff(rng);
        Vector x = basis * c;
        if (boxed) {
            const double peak = x.cwiseAbs().maxCoeff();
            if (peak > h.radius()) x *= h.radius() / peak;
        }
        return x;
    };
    const auto violation = [&](const Vector& y, const Vector& x1, const Vector& x2, double& gap) {
        const auto f = [&](const Vector& x) { return (y - forward(model, x)).squaredNorm(); };
        const double f1 = f(x1), f2 = f(x2), fm = f(0.5 * (x1 + x2));
        gap = 0.5 * f1 + 0.5 * f2 - fm;
        return gap < -1e-9 * std::max(1.0, 0.5 * f1 + 0.5 * f2 + fm);
    };

    ConvexityWitness out;
    for (std::size_t t = 0; t < trials; ++t) {
        out.trials_used = t + 1;
        const Matrix basis = sample_sum_subspace(set, rng);
        const Vector x1 = draw_point(basis);
        const Vector x2 = draw_point(basis);
        const Vector y1 = forward(model, x1);
        const Vector y2 = forward(model, x2);
        const Vector ybar = forward(model, 0.5 * (x1 + x2));

        Vector y_rand(model.rows());
        for (Index i = 0; i < y_rand.size(); ++i) y_rand[i] = gauss(rng);
        double gap = 0.0;
        if (violation(y_rand, x1, x2, gap)) {
            out = {true, false, t + 1, gap, y_rand, x1, x2};
            return out;
        }

        const Vector d = ybar - 0.5 * (y1 + y2);
        const double dd = d.squaredNorm();
        if (dd > 1e-20 * (1.0 + ybar.squaredNorm())) {
            const double k = 0.5 * y1.squaredNorm() + 0.5 * y2.squaredNorm() - ybar.squaredNorm();
            const Vector y = -((std::abs(k) + 1.0) / dd) * d;
            if (violation(y, x1, x2, gap)) {
                out = {true, false, t + 1, gap, y, x1, x2};
                return out;
            }
        }
    }
    out.budget_exhausted = true;
    return out;
}

// ---------------------------------------------------------------------------
// Flat key=value serialisation

inline KeyValues to_key_values(const RipEstimate& e) {
    return {{"alpha_hat", fmt_double(e.alpha_hat)},
            {"beta_hat", fmt_double(e.beta_hat)},
            {"trials", std::to_string(e.trials)},
            {"constraint", e.constraint},
            {"linearization_points_sampled", std::to_string(e.linearization_points_sampled)},
            {"estimate_kind", "monte_carlo_inner"}};
}

inline KeyValues to_key_values(const CEstimate& e) {
    return {{"C_hat", fmt_double(e.empirical)},
            {"C_analytic", fmt_double(e.analytic)},
            {"beta_operator_norm", fmt_double(e.beta_used)},
            {"trials", std::to_string(e.trials)}};
}

inline KeyValues to_key_values(const Lemma1Constants& l, bool printed, bool derived) {
    KeyValues kv;
    if (printed) {
        kv.emplace_back("printed.lower", fmt_double(l.printed.lower));
        kv.emplace_back("printed.upper", fmt_double(l.printed.upper));
    }
    if (derived) {
        kv.emplace_back("derived.lower", fmt_double(l.derived.lower));
        kv.emplace_back("derived.upper", fmt_double(l.derived.upper));
    }
    kv.emplace_back("vacuous", l.vacuous ? "true" : "false");
    return kv;
}

inline std::string fmt_count(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : "inf"; }

inline KeyValues to_key_values(const Theorem1Report& r) {
    KeyValues kv{{"alpha", fmt_double(r.alpha)},
                 {"mu", fmt_double(r.mu)},
                 {"delta", fmt_double(r.delta)},
                 {"x_a_norm", fmt_double(r.x_a_norm)},
                 {"dist_x_to_a", fmt_double(r.dist_x_to_a)},
                 {"k", std::to_string(r.k)},
                 {"a", fmt_double(r.a)},
                 {"b", fmt_double(r.b)},
                 {"epsilon_k", fmt_double(r.epsilon_k)},
                 {"k_star", r.not_applicable ? "not_applicable" : fmt_count(r.k_star)},
                 {"error_bound", fmt_double(r.error_bound)},
                 {"not_applicable", r.not_applicable ? "true" : "false"},
                 {"k_star_floored", r.k_star_floored ? "true" : "false"},
                 {"residuals_converged", r.residuals_converged ? "true" : "false"}};
    if (r.asymptotic_epsilon) {
        kv.emplace_back("asymptotic_epsilon", fmt_double(*r.asymptotic_epsilon));
        kv.emplace_back("asymptotic_bound", fmt_double(*r.asymptotic_bound));
    }
    return kv;
}

inline KeyValues to_key_values(const Corollary1Report& r, bool printed, bool derived) {
    KeyValues kv{{"alpha", fmt_double(r.alpha)},
                 {"mu", fmt_double(r.mu)},
                 {"C", fmt_double(r.c_lin)},
                 {"e_a_norm", fmt_double(r.e_a_norm)},
                 {"dist_x_to_a", fmt_double(r.dist_x_to_a)}};
    if (printed) {
        kv.emplace_back("printed.denominator", fmt_double(r.printed_denominator));
        kv.emplace_back("printed.constant", fmt_double(r.printed.constant));
        kv.emplace_back("printed.error_bound", fmt_double(r.printed.bound));
        kv.emplace_back("printed.negative_constant", r.negative_constant ? "true" : "false");
    }
    if (derived) {
        kv.emplace_back("derived.contraction", fmt_double(r.contraction));
        kv.emplace_back("derived.constant", fmt_double(r.derived.constant));
        kv.emplace_back("derived.error_bound", fmt_double(r.derived.bound));
        kv.emplace_back("derived.not_applicable", r.not_applicable ? "true" : "false");
    }
    return kv;
}

inline KeyValues to_key_values(const Theorem2Report& r, bool printed, bool derived) {
    KeyValues kv{{"alpha", fmt_double(r.alpha)},
                 {"mu", fmt_double(r.mu)},
                 {"f_opt", fmt_double(r.f_opt)},
                 {"x_opt_norm", fmt_double(r.x_opt_norm)},
                 {"delta", fmt_double(r.delta)},
                 {"c", fmt_double(r.c)},
                 {"n_star", r.not_applicable ? "not_applicable" : fmt_count(r.n_star)},
                 {"n_star_floored", r.n_star_floored ? "true" : "false"},
                 {"not_applicable", r.not_applicable ? "true" : "false"}};
    if (printed) kv.emplace_back("printed.error_bound", fmt_double(r.printed_bound));
    if (derived) kv.emplace_back("derived.error_bound", fmt_double(r.derived_bound));
    return kv;
}

inline KeyValues to_key_values(const RscpEstimate& e) {
    return {{"alpha_hat", fmt_double(e.alpha_hat)},
            {"beta_hat", fmt_double(e.beta_hat)},
            {"trials", std::to_string(e.trials)},
            {"not_rscp", e.not_rscp ? "true" : "false"}};
}

inline KeyValues to_key_values(const ConvexityWitness& w) {
    KeyValues kv{{"found", w.found ? "true" : "false"},
                 {"trials_used", std::to_string(w.trials_used)},
                 {"budget_exhausted", w.budget_exhausted ? "true" : "false"}};
    if (w.found) {
        kv.emplace_back("gap", fmt_double(w.gap));
        kv.emplace_back("y", fmt_vector(w.y));
        kv.emplace_back("x1", fmt_vector(w.x1));
        kv.emplace_back("x2", fmt_vector(w.x2));
    }
    return kv;
}

}  // namespace nliht
