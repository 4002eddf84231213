#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wnn {

// Exception hierarchy. The CLI maps InputError subclasses to exit 1 and
// PreconditionError subclasses to exit 2.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, shapes, values).
class InputError : public Error {
public:
    using Error::Error;
};

class FormatError : public InputError {
public:
    using InputError::InputError;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class NonFiniteError : public InputError {
public:
    using InputError::InputError;
};

/// A well-formed request that violates an operation's preconditions.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A layer norm exceeds the budget it is being certified against.
class BudgetExceeded : public PreconditionError {
public:
    BudgetExceeded(std::size_t layer, double norm, double budget);

    std::size_t layer() const noexcept { return layer_; }
    double norm() const noexcept { return norm_; }
    double budget() const noexcept { return budget_; }

private:
    std::size_t layer_;
    double norm_;
    double budget_;
};

class ConstantNotRepresentable : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class DegenerateUnit : public PreconditionError {
public:
    DegenerateUnit(std::size_t unit);

    std::size_t unit() const noexcept { return unit_; }

private:
    std::size_t unit_;
};

class UnsupportedNorm : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

}  // namespace wnn
