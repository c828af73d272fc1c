#pragma once

// Nonlinear iterative hard thresholding and projected gradient descent over
// a union-of-subspaces constraint.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nliht/constraints.hpp"
#include "nliht/operators.hpp"

namespace nliht {

struct SolverConfig {
    double mu = 1.0;
    std::size_t max_iterations = 1000;
    double residual_tolerance = 1e-8;
    double iterate_change_tolerance = 1e-10;
    bool record_trace = false;

    void validate() const {
        if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidInput("SolverConfig: mu must be positive and finite");
        if (max_iterations < 1) throw InvalidInput("SolverConfig: max_iterations must be >= 1");
        if (!(residual_tolerance >= 0.0)) throw InvalidInput("SolverConfig: residual_tolerance must be >= 0");
        if (!(iterate_change_tolerance >= 0.0)) {
            throw InvalidInput("SolverConfig: iterate_change_tolerance must be >= 0");
        }
    }
};

enum class StopReason { ResidualTol, IterateTol, MaxIter };

inline std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::ResidualTol: return "residual_tol";
        case StopReason::IterateTol: return "iterate_tol";
        case StopReason::MaxIter: return "max_iter";
    }
    return "unknown";
}

/// One record per visited iterate x^n. `iterate_change` is ||x^{n+1} - x^n||
/// and is NaN for the last record.
struct TraceEntry {
    std::size_t iteration = 0;
    double objective = 0.0;  // ||y - Phi(x^n)|| for NIHT, f(x^n) for PGD
    double iterate_change = 0.0;
    std::vector<Index> active;  // active set of x^n
    std::optional<double> e_a_norm;
    std::optional<double> target_distance;  // ||x_A - x^n||
    Vector iterate;
};

struct RecoveryResult {
    Vector estimate;
    std::size_t iterations_run = 0;
    StopReason stop_reason = StopReason::MaxIter;
    double final_objective = 0.0;
    std::vector<TraceEntry> trace;
};

namespace detail {

template <class Objective, class Step>
RecoveryResult run_projected_iteration(const ConstraintSet& set, const SolverConfig& cfg, double stop_objective,
                                       Objective&& objective, Step&& step,
                                       const std::function<void(const Vector&, TraceEntry&)>& annotate) {
    cfg.validate();
    const Index n = set.dimension();
    RecoveryResult out;
    Vector x = Vector::Zero(n);
    std::vector<Index> active = project_with_active(x, set).active;
    std::size_t it = 0;

    while (true) {
        const double obj = objective(x);
        if (!std::isfinite(obj)) throw Diverged("objective became non-finite", x, it);
        TraceEntry entry;
        if (cfg.record_trace) {
            entry.iteration = it;
            entry.objective = obj;
            entry.iterate_change = std::nan("");
            entry.active = active;
            entry.iterate = x;
            if (annotate) annotate(x, entry);
        }
        const auto finish = [&](StopReason why) {
            out.estimate = x;
            out.iterations_run = it;
            out.stop_reason = why;
            out.final_objective = obj;
            if (cfg.record_trace) out.trace.push_back(std::move(entry));
            return out;
        };
        if (obj <= stop_objective) return finish(StopReason::ResidualTol);
        if (it >= cfg.max_iterations) return finish(StopReason::MaxIter);

        const Vector candidate = step(x);
        if (!candidate.allFinite()) throw Diverged("gradient step became non-finite", x, it);
        Projection next = project_with_active(candidate, set);
        const double change = (next.value - x).norm();
        if (cfg.record_trace) {
            entry.iterate_change = change;
            out.trace.push_back(std::move(entry));
        }
        x = std::move(next.value);
        active = std::move(next.active);
        ++it;
        if (change <= cfg.iterate_change_tolerance) {
            const double final_obj = objective(x);
            if (!std::isfinite(final_obj)) throw Diverged("objective became non-finite", x, it);
            out.estimate = x;
            out.iterations_run = it;
            out.stop_reason = StopReason::IterateTol;
            out.final_objective = final_obj;
            if (cfg.record_trace) {
                TraceEntry last;
                last.iteration = it;
                last.objective = final_obj;
                last.iterate_change = std::nan("");
                last.active = active;
                last.iterate = x;
                if (annotate) annotate(x, last);
                out.trace.push_back(std::move(last));
            }
            return out;
        }
    }
}

}  // namespace detail

/// Iterative hard thresholding with the Jacobian linearised at the current
/// iterate:
///
///   x^{n+1} = P_A(x^n + mu * Phi_{x^n}^T (y - Phi(x^n))),  x^0 = 0.
///
/// Stops at the first of: ||y - Phi(x^n)|| <= residual_tolerance,
/// ||x^{n+1} - x^n|| <= iterate_change_tolerance, or max_iterations updates.
/// When `ground_truth` is given and the trace is recorded, every entry also
/// carries ||e_A^n|| = ||y - Phi(x^n) - Phi_{x^n}(x_A - x^n)|| and
/// ||x_A - x^n|| with x_A = P_A(ground_truth). These never affect the iterates.
inline RecoveryResult niht_solve(const Vector& y, const MeasurementModel& model, const ConstraintSet& set,
                                 const SolverConfig& cfg, const std::optional<Vector>& ground_truth = std::nullopt) {
    require_size(y, model.rows(), "niht_solve y");
    require_finite(y, "niht_solve y");
    if (set.dimension() != model.cols()) throw InvalidInput("niht_solve: constraint dimension differs from model");

    std::optional<Vector> x_a;
    if (ground_truth) {
        require_size(*ground_truth, model.cols(), "niht_solve ground_truth");
        x_a = project(*ground_truth, set);
    }

    const auto residual_norm = [&](const Vector& x) { return (y - forward(model, x)).norm(); };
    const auto step = [&](const Vector& x) -> Vector {
        const Vector r = y - forward(model, x);
        return x + cfg.mu * jacobian_adjoint_apply(model, x, r);
    };
    std::function<void(const Vector&, TraceEntry&)> annotate;
    if (x_a) {
        annotate = [&](const Vector& x, TraceEntry& e) {
            const Vector d = *x_a - x;
            e.e_a_norm = (y - forward(model, x) - jacobian_apply(model, x, d)).norm();
            e.target_distance = d.norm();
        };
    }
    return detail::run_projected_iteration(set, cfg, cfg.residual_tolerance, residual_norm, step, annotate);
}

/// Differentiable objective f >= 0 with its gradient.
struct Objective {
    std::function<double(const Vector&)> evaluate;
    std::function<Vector(const Vector&)> gradient;
};

/// f(x) = ||y - Phi(x)||^2, gradient -2 Phi_x^T (y - Phi(x)).
inline Objective least_squares_objective(MeasurementModel model, Vector y) {
    require_size(y, model.rows(), "least_squares_objective");
    auto shared_model = std::make_shared<const MeasurementModel>(std::move(model));
    auto shared_y = std::make_shared<const Vector>(std::move(y));
    Objective obj;
    obj.evaluate = [shared_model, shared_y](const Vector& x) {
        return (*shared_y - forward(*shared_model, x)).squaredNorm();
    };
    obj.gradient = [shared_model, shared_y](const Vector& x) -> Vector {
        const Vector r = *shared_y - forward(*shared_model, x);
        return -2.0 * jacobian_adjoint_apply(*shared_model, x, r);
    };
    return obj;
}

/// Projected Landweber iteration x^{n+1} = P_A(x^n - (mu/2) grad f(x^n)),
/// x^0 = 0. The residual stopping rule compares sqrt(f(x^n)) with
/// residual_tolerance, which is the residual norm for least-squares objectives.
inline RecoveryResult pgd_solve(const Objective& obj, const ConstraintSet& set, const SolverConfig& cfg) {
    if (!obj.evaluate || !obj.gradient) throw InvalidInput("pgd_solve: objective is incomplete");
    const Index n = set.dimension();
    const auto value = [&](const Vector& x) {
        const double f = obj.evaluate(x);
        if (f < 0.0) throw InvalidInput("pgd_solve: objective must be non-negative");
        return f;
    };
    const auto step = [&](const Vector& x) -> Vector {
        const Vector g = obj.gradient(x);
        require_size(g, n, "pgd_solve gradient");
        return x - (cfg.mu / 2.0) * g;
    };
    // Comparing f against tol^2 is the same test as sqrt(f) <= tol.
    const double stop = cfg.residual_tolerance * cfg.residual_tolerance;
    return detail::run_projected_iteration(set, cfg, stop, value, step, {});
}

/// Step-size window. Bounds are on mu, not 1/mu.
struct StepWindow {
    double lower = 0.0;
    double upper = 0.0;
    bool lower_open = true;
    bool upper_open = false;

    bool contains(double mu) const {
        const bool above = lower_open ? mu > lower : mu >= lower;
        const bool below = upper_open ? mu < upper : mu <= upper;
        return above && below;
    }
};

inline constexpr const char* kNihtStepCondition = "beta <= 1/mu < 1.5*alpha - 4*C";
inline constexpr const char* kPgdStepCondition = "beta <= 1/mu <= (4/3)*alpha";

/// mu with beta <= 1/mu < 1.5 alpha - 4C, i.e. mu in (1/(1.5 alpha - 4C), 1/beta].
/// C = 0 gives the noise-free condition. nullopt means infeasible.
inline std::optional<StepWindow> admissible_step_niht(double alpha, double beta, double c) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("admissible_step_niht: alpha and beta must be positive");
    if (!(c >= 0.0)) throw InvalidInput("admissible_step_niht: C must be >= 0");
    if (beta < alpha) throw InvalidInput("admissible_step_niht: beta must be >= alpha");
    const double cap = 1.5 * alpha - 4.0 * c;
    if (!(beta < cap)) return std::nullopt;
    return StepWindow{1.0 / cap, 1.0 / beta, true, false};
}

/// mu with beta <= 1/mu <= (4/3) alpha, i.e. mu in [3/(4 alpha), 1/beta].
/// At mu = 3/(4 alpha) the contraction factor 4(1 - mu alpha) equals one.
inline std::optional<StepWindow> admissible_step_pgd(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("admissible_step_pgd: alpha and beta must be positive");
    if (beta < alpha) throw InvalidInput("admissible_step_pgd: beta must be >= alpha");
    if (!(beta <= 4.0 * alpha / 3.0)) return std::nullopt;
    return StepWindow{3.0 / (4.0 * alpha), 1.0 / beta, false, false};
}

inline double pgd_contraction_factor(double alpha, double mu) { return 4.0 * (1.0 - mu * alpha); }

/// True when the geometric bound for PGD degenerates (c >= 1 - 1e-9).
inline bool pgd_step_degenerate(double alpha, double mu) { return pgd_contraction_factor(alpha, mu) >= 1.0 - 1e-9; }

}  // namespace nliht
