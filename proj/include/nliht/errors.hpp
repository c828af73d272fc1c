#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace nliht {

/// Bad arguments: dimension mismatch, out-of-range parameter, malformed set.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A bounded-derivative nonlinearity was evaluated outside its declared box.
class DomainViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterate or gradient became non-finite. Carries the last finite iterate
/// and the iteration index at which the failure was detected.
class Diverged : public std::runtime_error {
public:
    Diverged(const std::string& what, Eigen::VectorXd last_finite, std::size_t iteration)
        : std::runtime_error(what), last_finite_(std::move(last_finite)), iteration_(iteration) {}

    const Eigen::VectorXd& last_finite() const noexcept { return last_finite_; }
    std::size_t iteration() const noexcept { return iteration_; }

private:
    Eigen::VectorXd last_finite_;
    std::size_t iteration_;
};

}  // namespace nliht
