#pragma once

#include <stdexcept>
#include <string>

namespace emuq {

/// Bad run configuration or violated call contract. CLI exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (non-convergent solve, zero total variance, ...). CLI exit code 3.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system / parse failures. CLI exit code 4.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace emuq
