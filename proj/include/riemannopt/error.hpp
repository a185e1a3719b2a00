#pragma once

#include <stdexcept>
#include <string>

namespace riemannopt {

// Root of every error raised by the library. Harness code maps the concrete
// subclasses onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths or image shapes disagree.
class InputShapeError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A computation produced a NaN/Inf or otherwise failed numerically.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The metric is undefined for this input (e.g. f(x) == f(x')).
class DegenerateInputError : public Error {
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

}  // namespace riemannopt
