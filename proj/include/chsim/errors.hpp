#pragma once

#include <stdexcept>
#include <string>

namespace chsim {

/// Invalid grid, field shape, or scenario value. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the range where an operator is defined
/// (r < 1 for the inertia operator, b = 1 for the Casimir exponent).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A formulation or diagnostic was requested outside its stated hypotheses
/// (nonlocal form with r != 1, m-flow identity with nonzero alpha).
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The flow map lost monotonicity or phi_x <= 0 at some marker.
class FlowDegeneracyError : public std::runtime_error {
public:
    FlowDegeneracyError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

/// Least-squares fit with no usable data.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace chsim
