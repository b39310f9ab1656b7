#pragma once

#include <stdexcept>
#include <string>

namespace lqe {

// Bad argument: wrong shape, out-of-range level, non-finite value.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation called on an object in the wrong state (e.g. empty accumulator).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed external input. Carries the 1-based line number when known.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace lqe
