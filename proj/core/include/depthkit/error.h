#pragma once

#include <stdexcept>
#include <string>

namespace depthkit {

// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when file contents do not parse as the declared format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a scale/shift system has no unique solution.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace depthkit
