// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#ifndef CDMAGAME_ERRORS_HPP
#define CDMAGAME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cdmagame {

// Common base so callers can catch every library failure in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// A user whose channel is identically zero has no defined SINR.
class DegenerateChannel : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string &what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IntegrationFailure : public Error {
public:
    using Error::Error;
};

class NoEquilibrium : public Error {
public:
    using Error::Error;
};

class NoSolutionInBracket : public Error {
public:
    using Error::Error;
};

// Load exceeds the strict feasibility bound of a linear receiver.
class InfeasibleLoad : public Error {
public:
    InfeasibleLoad(const std::string &what, std::string bound)
        : Error(what), bound_(std::move(bound)) {}
    const std::string &bound() const noexcept { return bound_; }

private:
    std::string bound_;
};

// An allocated power exceeds Pmax.
class FeasibilityViolation : public Error {
public:
    using Error::Error;
};

class InvalidSignal : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace cdmagame

#endif
