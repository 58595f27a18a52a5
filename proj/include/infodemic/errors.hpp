#pragma once

#include <stdexcept>
#include <string>

namespace infodemic {

// Malformed or inconsistent input data (bad file contents, shape mismatch).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration or argument values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required upstream artifact (model file, labels, ...) is missing.
class MissingDependency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infodemic
