#pragma once

#include <stdexcept>
#include <string>

namespace boundlab {

/// Arrays of incompatible shapes were combined.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value violates a documented domain invariant (probability rows, discount, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A linear solve produced a result that failed its residual check.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation refused to run because a measurable precondition failed.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(const std::string& what, double measured)
        : std::runtime_error(what), measured_(measured) {}

    double measured() const noexcept { return measured_; }

private:
    double measured_;
};

}  // namespace boundlab
