#pragma once

#include <stdexcept>
#include <string>

namespace survlink {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// ConfigError -> 2, DataError (and subclasses) -> 3, NumericalError -> 4.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough samples to perform the requested estimate.
class InsufficientDataError : public DataError {
 public:
  explicit InsufficientDataError(const std::string& what) : DataError(what) {}
};

/// Samples are formally present but carry no usable information
/// (e.g. all durations identical, so the shape MLE diverges).
class DegenerateDataError : public DataError {
 public:
  explicit DegenerateDataError(const std::string& what) : DataError(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace survlink
