#pragma once

#include <stdexcept>
#include <string>

namespace scirs {

/// Invalid model parameter; `field()` names the offending key.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NoEndemicEquilibrium : public std::domain_error {
public:
    explicit NoEndemicEquilibrium(double r0)
        : std::domain_error("no endemic equilibrium: R0 = " + std::to_string(r0) + " <= 1"), r0_(r0) {}

    double r0() const noexcept { return r0_; }

private:
    double r0_;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NotSymmetric : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An integration stage produced NaN or Inf.
class NonFiniteState : public std::runtime_error {
public:
    explicit NonFiniteState(double t)
        : std::runtime_error("non-finite state at t = " + std::to_string(t)), time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Two algebraically equivalent evaluations disagreed.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed configuration input (params file, CLI values).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace scirs
