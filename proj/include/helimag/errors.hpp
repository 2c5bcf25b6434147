#pragma once

#include <stdexcept>
#include <string>

namespace helimag {

/// Fixed-point iteration failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration input; line is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

}  // namespace helimag
