#pragma once

#include <stdexcept>
#include <string>

namespace md {

// Raised when a theorem-level invariant fails at runtime (e.g. a run of the
// fixed-budget solver ends with no productive step). Maps to exit code 1.
struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed instance file. Maps to exit code 2.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid file whose contents violate an instance invariant
// (dimension mismatch, non-PSD piece, ...). Maps to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace md
