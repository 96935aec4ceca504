#pragma once

#include <stdexcept>

namespace mmdk {

// Error taxonomy. The CLI maps these to exit codes:
// validation -> 1, numeric/convergence -> 2, I/O -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file magic/version/structure.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmdk
