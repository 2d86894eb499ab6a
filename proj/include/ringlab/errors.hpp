#pragma once

#include <stdexcept>
#include <string>

namespace ringlab {

// Error taxonomy. The CLI maps each family onto an exit code:
// config/domain -> 1, convergence/no-stagnation -> 2, everything else -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

class SingularityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "singularity"; }
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int iterations = 0)
        : Error(what), iterations_(iterations) {}
    const char* kind() const noexcept override { return "convergence"; }
    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

class NoStagnationError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
    const char* kind() const noexcept override { return "no_stagnation"; }
};

class FitError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "fit"; }
};

class TraceError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "trace"; }
};

class RangeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "range"; }
};

class TruncationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "truncation"; }
};

}  // namespace ringlab
