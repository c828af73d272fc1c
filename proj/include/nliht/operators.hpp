#pragma once

// Measurement models y = Phi(x): a plain matrix, or a matrix applied after an
// entrywise perturbation x -> x + h(x) with |h'| bounded below one.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "nliht/types.hpp"

namespace nliht {

enum class NonlinearityKind { Identity, ScaledSine, ScaledTanh, Cubic };

inline std::string to_string(NonlinearityKind k) {
    switch (k) {
        case NonlinearityKind::Identity: return "identity";
        case NonlinearityKind::ScaledSine: return "sine";
        case NonlinearityKind::ScaledTanh: return "tanh";
        case NonlinearityKind::Cubic: return "cubic";
    }
    return "unknown";
}

inline NonlinearityKind nonlinearity_from_string(const std::string& s) {
    if (s == "identity" || s == "none") return NonlinearityKind::Identity;
    if (s == "sine" || s == "sin") return NonlinearityKind::ScaledSine;
    if (s == "tanh") return NonlinearityKind::ScaledTanh;
    if (s == "cubic") return NonlinearityKind::Cubic;
    throw InvalidInput("unknown nonlinearity '" + s + "'");
}

/// Entrywise perturbation h with h(0) = 0 and sup |h'| = derivative_bound() < 1.
class Nonlinearity {
public:
    static Nonlinearity identity() { return Nonlinearity(NonlinearityKind::Identity, 0.0, 0.0); }

    static Nonlinearity sine(double s) { return make(NonlinearityKind::ScaledSine, s, 0.0); }
    static Nonlinearity tanh(double s) { return make(NonlinearityKind::ScaledTanh, s, 0.0); }

    /// s * t^3 restricted to |t| <= radius; outside the box the derivative
    /// bound no longer holds and evaluation throws DomainViolation.
    static Nonlinearity cubic(double s, double radius) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("cubic: radius must be positive");
        return make(NonlinearityKind::Cubic, s, radius);
    }

    static Nonlinearity make(NonlinearityKind kind, double s, double radius = 0.0) {
        if (kind == NonlinearityKind::Identity) return identity();
        if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("nonlinearity scale must be >= 0");
        Nonlinearity h(kind, s, radius);
        if (!(h.derivative_bound() < 1.0)) {
            throw InvalidInput("nonlinearity derivative bound " + std::to_string(h.derivative_bound()) +
                               " must be < 1");
        }
        return h;
    }

    NonlinearityKind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }
    double radius() const noexcept { return radius_; }

    double derivative_bound() const noexcept {
        switch (kind_) {
            case NonlinearityKind::Identity: return 0.0;
            case NonlinearityKind::ScaledSine:
            case NonlinearityKind::ScaledTanh: return scale_;
            case NonlinearityKind::Cubic: return 3.0 * scale_ * radius_ * radius_;
        }
        return 0.0;
    }

    double value(double t) const {
        switch (kind_) {
            case NonlinearityKind::Identity: return 0.0;
            case NonlinearityKind::ScaledSine: return scale_ * std::sin(t);
            case NonlinearityKind::ScaledTanh: return scale_ * std::tanh(t);
            case NonlinearityKind::Cubic: check_box(t); return scale_ * t * t * t;
        }
        return 0.0;
    }

    double derivative(double t) const {
        switch (kind_) {
            case NonlinearityKind::Identity: return 0.0;
            case NonlinearityKind::ScaledSine: return scale_ * std::cos(t);
            case NonlinearityKind::ScaledTanh: {
                const double c = std::cosh(t);
                return scale_ / (c * c);
            }
            case NonlinearityKind::Cubic: check_box(t); return 3.0 * scale_ * t * t;
        }
        return 0.0;
    }

private:
    Nonlinearity(NonlinearityKind k, double s, double r) : kind_(k), scale_(s), radius_(r) {}

    void check_box(double t) const {
        if (!(std::abs(t) <= radius_)) {
            throw DomainViolation("cubic nonlinearity evaluated at " + std::to_string(t) + " outside [-" +
                                  std::to_string(radius_) + ", " + std::to_string(radius_) + "]");
        }
    }

    NonlinearityKind kind_;
    double scale_;
    double radius_;
};

class MeasurementModel {
public:
    static MeasurementModel linear(Matrix phi, double noise_sigma = 0.0) {
        return MeasurementModel(std::move(phi), std::nullopt, noise_sigma);
    }

    static MeasurementModel composed(Matrix phi, Nonlinearity h, double noise_sigma = 0.0) {
        return MeasurementModel(std::move(phi), std::move(h), noise_sigma);
    }

    Index rows() const noexcept { return phi_.rows(); }
    Index cols() const noexcept { return phi_.cols(); }
    const Matrix& matrix() const noexcept { return phi_; }
    bool is_linear() const noexcept { return !h_.has_value(); }
    double noise_sigma() const noexcept { return noise_sigma_; }

    /// Identity for linear models.
    Nonlinearity nonlinearity() const { return h_.value_or(Nonlinearity::identity()); }

    /// sup |h'|; zero for linear models.
    double derivative_bound() const noexcept { return h_ ? h_->derivative_bound() : 0.0; }

    /// x + h(x), entrywise.
    Vector perturbed(const Vector& x) const {
        if (!h_) return x;
        Vector out(x.size());
        for (Index i = 0; i < x.size(); ++i) out[i] = x[i] + h_->value(x[i]);
        return out;
    }

    /// diag(I + H'_x) as a vector.
    Vector jacobian_diagonal(const Vector& x) const {
        Vector d(x.size());
        for (Index i = 0; i < x.size(); ++i) d[i] = 1.0 + (h_ ? h_->derivative(x[i]) : 0.0);
        return d;
    }

private:
    MeasurementModel(Matrix phi, std::optional<Nonlinearity> h, double sigma)
        : phi_(std::move(phi)), h_(std::move(h)), noise_sigma_(sigma) {
        if (phi_.rows() < 1 || phi_.cols() < 1) throw InvalidInput("measurement matrix must be non-empty");
        if (!phi_.allFinite()) throw InvalidInput("measurement matrix has non-finite entries");
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("noise_sigma must be >= 0");
    }

    Matrix phi_;
    std::optional<Nonlinearity> h_;
    double noise_sigma_;
};

/// Noiseless forward map.
inline Vector forward(const MeasurementModel& model, const Vector& x) {
    require_size(x, model.cols(), "forward");
    require_finite(x, "forward");
    if (model.is_linear()) return model.matrix() * x;
    return model.matrix() * model.perturbed(x);
}

/// Jacobian at `point` applied to v: Phi_bar (I + H'_point) v.
inline Vector jacobian_apply(const MeasurementModel& model, const Vector& point, const Vector& v) {
    require_size(v, model.cols(), "jacobian_apply");
    if (model.is_linear()) return model.matrix() * v;
    require_size(point, model.cols(), "jacobian_apply point");
    return model.matrix() * model.jacobian_diagonal(point).cwiseProduct(v);
}

/// Adjoint Jacobian at `point` applied to r: (I + H'_point) Phi_bar^T r.
inline Vector jacobian_adjoint_apply(const MeasurementModel& model, const Vector& point, const Vector& r) {
    require_size(r, model.rows(), "jacobian_adjoint_apply");
    if (model.is_linear()) return model.matrix().transpose() * r;
    require_size(point, model.cols(), "jacobian_adjoint_apply point");
    return model.jacobian_diagonal(point).cwiseProduct(model.matrix().transpose() * r);
}

/// || Phi(x1) - Phi(x2) - Phi_{x1}(x1 - x2) ||.
inline double linearization_residual(const MeasurementModel& model, const Vector& x1, const Vector& x2) {
    require_size(x1, model.cols(), "linearization_residual x1");
    require_size(x2, model.cols(), "linearization_residual x2");
    if (model.is_linear()) return 0.0;
    return (forward(model, x1) - forward(model, x2) - jacobian_apply(model, x1, x1 - x2)).norm();
}

/// Largest squared singular value of the matrix.
inline double operator_norm_squared(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const double s = svd.singularValues()(0);
    return s * s;
}

/// Max over coordinate directions of the sup-norm gap between a forward
/// difference quotient and the supplied Jacobian action.
template <class Forward, class Jacobian>
double fd_jacobian_check(Forward&& fwd, Jacobian&& jac, const Vector& point, double step) {
    if (!(step >= 1e-8 && step <= 1e-3)) throw InvalidInput("fd_jacobian_check: step must lie in [1e-8, 1e-3]");
    const Vector base = fwd(point);
    double worst = 0.0;
    for (Index j = 0; j < point.size(); ++j) {
        Vector shifted = point;
        shifted[j] += step;
        const Vector e = Vector::Unit(point.size(), j);
        const Vector fd = (fwd(shifted) - base) / step;
        worst = std::max(worst, (fd - jac(point, e)).cwiseAbs().maxCoeff());
    }
    return worst;
}

inline double fd_jacobian_check(const MeasurementModel& model, const Vector& point, double step) {
    require_size(point, model.cols(), "fd_jacobian_check");
    return fd_jacobian_check([&](const Vector& x) { return forward(model, x); },
                             [&](const Vector& p, const Vector& v) { return jacobian_apply(model, p, v); },
                             point, step);
}

}  // namespace nliht
