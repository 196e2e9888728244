#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace extqv {

/// Invalid input or configuration. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failure while producing a path (non-finite state, I/O). Maps to exit code 2.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimulationError : public RuntimeFailure {
public:
    SimulationError(const std::string& what, std::size_t step)
        : RuntimeFailure(what), step_(step) {}

    /// Grid step at which the state became non-finite.
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace extqv
