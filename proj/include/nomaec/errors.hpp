#pragma once

#include <stdexcept>
#include <string>

namespace nomaec {

/// Invalid configuration (bad parameter values, malformed config files).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical routine failed to reach the requested tolerance.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nomaec
