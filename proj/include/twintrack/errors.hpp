#pragma once

#include <stdexcept>
#include <string>

namespace twintrack {

/// Raised when any plant state entry becomes NaN/Inf during integration.
class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(double t, const std::string& what_entry)
        : std::runtime_error("simulation diverged at t=" + std::to_string(t) +
                             " (" + what_entry + ")"),
          time(t) {}
    double time;
};

/// Slip kinematics called with degenerate input (caller must apply the
/// low-speed guard before reaching the tire kernels).
class UndefinedSlip : public std::domain_error {
public:
    explicit UndefinedSlip(const std::string& msg) : std::domain_error(msg) {}
};

class InvalidTireParams : public std::invalid_argument {
public:
    explicit InvalidTireParams(const std::string& msg)
        : std::invalid_argument(msg) {}
};

class TrimFailure : public std::runtime_error {
public:
    explicit TrimFailure(const std::string& msg) : std::runtime_error(msg) {}
};

class ModeIdentificationError : public std::runtime_error {
public:
    explicit ModeIdentificationError(const std::string& msg)
        : std::runtime_error(msg) {}
};

class AllocationInfeasible : public std::runtime_error {
public:
    explicit AllocationInfeasible(const std::string& msg)
        : std::runtime_error(msg) {}
};

class ControllerFault : public std::runtime_error {
public:
    explicit ControllerFault(const std::string& msg)
        : std::runtime_error(msg) {}
};

/// Config/schema violations; message carries the offending field path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace twintrack
