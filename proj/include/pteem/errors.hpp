#pragma once

#include <stdexcept>
#include <string>

namespace pteem {

// Bad user-facing configuration (unknown keys, invalid ladder bounds, ...).
// The CLI maps these to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Failures during a run (non-finite density, unreadable data file, ...).
// The CLI maps these to exit code 3.
struct run_error : std::runtime_error {
    explicit run_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pteem
