#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace garchint {

// Violated preconditions and invalid parameter values. The message names the
// offending field.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for errors that come from the mathematics rather than from bad input
// plumbing. The CLI maps these to exit status 1.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InfeasibleDrift : public DomainError {
public:
    explicit InfeasibleDrift(const std::string& what) : DomainError("InfeasibleDrift", what) {}
};

class OutOfBand : public DomainError {
public:
    explicit OutOfBand(const std::string& what) : DomainError("OutOfBand", what) {}
};

class NoConvergence : public DomainError {
public:
    explicit NoConvergence(const std::string& what) : DomainError("NoConvergence", what) {}
};

class NonFinite : public DomainError {
public:
    explicit NonFinite(const std::string& what) : DomainError("NonFinite", what) {}
};

class EmptyInput : public DomainError {
public:
    explicit EmptyInput(const std::string& what) : DomainError("EmptyInput", what) {}
};

class EmptySample : public DomainError {
public:
    explicit EmptySample(const std::string& what) : DomainError("EmptySample", what) {}
};

class DivergentMoment : public DomainError {
public:
    explicit DivergentMoment(const std::string& what) : DomainError("DivergentMoment", what) {}
};

class DensityMismatch : public DomainError {
public:
    explicit DensityMismatch(const std::string& what) : DomainError("DensityMismatch", what) {}
};

// I/O and configuration failures; exit status 2 in the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace garchint
