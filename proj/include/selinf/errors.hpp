#pragma once

#include <stdexcept>
#include <string>

namespace selinf {

/// Bad arguments or unmet preconditions supplied by the caller.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input data (CSV, JSON).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The design violates general position (a column is numerically in the
/// span of the active columns).
class GeneralPositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal inconsistency, e.g. the realized response is not inside the
/// polyhedron that was built from it.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed (root bracketing, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace selinf
