#ifndef PROPDELAY_ERRORS_HPP
#define PROPDELAY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace propdelay {

// Base of every error the library throws. The CLI maps all of these to exit
// code 2 (input error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two series (or a series and an operation) live on different t^alpha grids.
class AlphaMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Gamma evaluated at a non-positive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimError : public Error {
 public:
  using Error::Error;
};

// A truncated series did not pass its term-doubling convergence guard.
class Unconverged : public Error {
 public:
  using Error::Error;
};

// Malformed textual/JSON input. field() names the offending key when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::string field = {})
      : Error(field.empty() ? what : "field '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace propdelay

#endif  // PROPDELAY_ERRORS_HPP
