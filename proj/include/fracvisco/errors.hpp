#pragma once

#include <stdexcept>
#include <string>

namespace fracvisco {

/// Raised when a run configuration cannot be parsed or validated.
/// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when the material/data hypotheses of the problem are violated.
/// Carries the name of the violated hypothesis and a witness point.
/// CLI maps this to exit code 3.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(std::string hypothesis, double witness, const std::string& msg)
        : std::runtime_error(msg), hypothesis_(std::move(hypothesis)), witness_(witness) {}
    const std::string& hypothesis() const noexcept { return hypothesis_; }
    double witness() const noexcept { return witness_; }

private:
    std::string hypothesis_;
    double witness_;
};

/// Raised when the time integrator detects divergence (overflow guard)
/// or a fixed-point iteration fails to converge. CLI maps this to exit code 4.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg, double residual = 0.0)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace fracvisco
