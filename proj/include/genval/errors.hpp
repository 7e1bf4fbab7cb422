#ifndef GENVAL_ERRORS_HPP
#define GENVAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace genval {

/// Base for all recoverable user/data errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File bytes do not match the expected grammar.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Content parsed but violates a domain invariant (non-finite value, shape mismatch, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A stored index points outside its table.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant violated. Not derived from Error: the CLI maps it to exit code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace genval

#endif  // GENVAL_ERRORS_HPP
