#ifndef TRELLIP_ERRORS_HPP
#define TRELLIP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace trellip {

// Base class for all library errors. `name()` is the stable identifier
// reported by the CLI on exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept { return "error"; }
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
  const char* name() const noexcept override { return "invalid-parameter"; }
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char* name() const noexcept override { return "non-convergence"; }
};

class QuadratureError : public Error {
 public:
  using Error::Error;
  const char* name() const noexcept override { return "quadrature-failure"; }
};

class ExistenceError : public Error {
 public:
  using Error::Error;
  const char* name() const noexcept override { return "existence-violation"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* name() const noexcept override { return "io-error"; }
};

}  // namespace trellip

#endif  // TRELLIP_ERRORS_HPP
