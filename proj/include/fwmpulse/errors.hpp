#pragma once

#include <stdexcept>
#include <string>

namespace fwm {

// Config/file-format problems. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A transfer function or covariance matrix violates the physicality
// (commutator / uncertainty) conditions. CLI exit code 3.
class PhysicalityError : public std::runtime_error {
public:
    explicit PhysicalityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical iteration failed to converge. CLI exit code 4.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace fwm
