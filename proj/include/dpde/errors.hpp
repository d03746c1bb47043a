#pragma once

#include <stdexcept>
#include <string>

namespace dpde {

// Bad user-supplied configuration (rejected before any computation starts).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed runtime input (size mismatch, out-of-domain point, ...).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

// History buffer cannot serve the requested time.
class InvalidState : public std::runtime_error {
public:
    explicit InvalidState(const std::string& msg) : std::runtime_error(msg) {}
};

// A non-finite coefficient appeared during time stepping.  Global existence of
// the continuous problem means this always indicates a discretization bug, so
// the offending time is carried for the report.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& msg, double t)
        : std::runtime_error(msg + " (t = " + std::to_string(t) + ")"), time(t) {}
    double time;
};

} // namespace dpde
