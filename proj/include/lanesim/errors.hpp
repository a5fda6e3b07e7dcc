#pragma once

#include <stdexcept>
#include <string>

namespace lanesim {

// Bad machine or kernel configuration (caught at setup, exit code 1 in the CLI).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed assembly text.
class DecodeError : public std::runtime_error {
public:
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Simulated output disagrees with the functional reference (exit code 2).
class FunctionalError : public std::runtime_error {
public:
  explicit FunctionalError(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant of the machine model was violated (exit code 3).
// These checks stay enabled in release builds.
class InvariantError : public std::logic_error {
public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

// Measurement preconditions not met (e.g. fewer than two samples for a gap).
class MeasureError : public std::runtime_error {
public:
  explicit MeasureError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
[[noreturn]] void invariant_failure(const char* expr, const char* file, int line);
}

} // namespace lanesim

// Always-on internal consistency check.  Not for user input validation.
#define SIM_CHECK(expr)                                                        \
  do {                                                                         \
    if (!(expr)) ::lanesim::detail::invariant_failure(#expr, __FILE__, __LINE__); \
  } while (0)
