#pragma once

#include <stdexcept>
#include <string>

namespace slotmech {

// Malformed or inconsistent caller input (bad instance file, dimension
// mismatch, invalid CLI arguments). Maps to process exit code 1.
class InvalidInputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Structurally valid input that a component cannot handle (posted-price
// mechanism with capacity below 3, oversized exact-solver instances).
// Maps to process exit code 2.
class UnsupportedConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InstanceTooLargeError : public UnsupportedConfigError {
public:
  using UnsupportedConfigError::UnsupportedConfigError;
};

class DegenerateInstanceError : public UnsupportedConfigError {
public:
  using UnsupportedConfigError::UnsupportedConfigError;
};

// Broken internal invariant. Always a bug, never a user error. Maps to
// process exit code 3.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

inline void internal_check(bool cond, const char* what) {
  if (!cond) throw InternalError(what);
}

inline void require_input(bool cond, const std::string& what) {
  if (!cond) throw InvalidInputError(what);
}

}  // namespace slotmech
